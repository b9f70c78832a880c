// Recorded responses from the live service for the hepatitis C
// happy-path session (labs -> diagnosis -> report -> plan).

export const FIXTURES = {
  "created": {
    "id": "abc123",
    "state": "NEW"
  },
  "afterLabs": {
    "id": "abc123",
    "state": "TESTS_RECOMMENDED",
    "record": {
      "uid": "http://example.org/session/9ca399834f68",
      "age": 45,
      "sex": 1,
      "labs": {
        "ALB": 40.0,
        "ALP": 50.0,
        "ALT": 9.0,
        "AST": 40.0,
        "BIL": 10.0,
        "CHE": 8.0,
        "CHOL": 5.0,
        "CREA": 70.0,
        "GGT": 20.0,
        "PROT": 70.0
      }
    },
    "diagnosis": "HepatitisC",
    "fired_rules": [
      {
        "rule": "hepatitis_c_screen",
        "head_property": "isHepatitisCpatient",
        "comparisons": [
          "?ast = 40.0 <= 53.05",
          "?alp = 50.0 <= 52.3",
          "?bil = 10.0 <= 11.0",
          "?alt = 9.0 <= 9.25"
        ],
        "bindings": {
          "alp": 50.0,
          "alt": 9.0,
          "ast": 40.0,
          "bil": 10.0,
          "x": "http://example.org/session/9ca399834f68"
        },
        "rendered": "derived <http://example.org/session/9ca399834f68> <http://example.org/liver#isHepatitisCpatient> \"true\"^^<http://www.w3.org/2001/XMLSchema#boolean> . by rule hepatitis_c_screen\n  bindings: ?alp = 50.0, ?alt = 9.0, ?ast = 40.0, ?bil = 10.0, ?x = http://example.org/session/9ca399834f68\n  satisfied: ?ast = 40.0 <= 53.05\n  satisfied: ?alp = 50.0 <= 52.3\n  satisfied: ?bil = 10.0 <= 11.0\n  satisfied: ?alt = 9.0 <= 9.25\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/liver#Patient> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueAST> \"40.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueALP> \"50.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueBIL> \"10.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueALT> \"9.0\"^^<http://www.w3.org/2001/XMLSchema#float> ."
      }
    ],
    "recommended_tests": [
      {
        "test": "HCV RNA confirmation",
        "provenance": "guideline:g1_hcv_rna_diagnosis"
      },
      {
        "test": "Fibrosis staging",
        "provenance": "guideline:g2_standard_treatment_eligibility"
      },
      {
        "test": "Child-Pugh assessment",
        "provenance": "treatment_algorithm:cirrhosis_branch"
      }
    ],
    "report_text": null,
    "report_facts": null,
    "plan": null
  },
  "afterReport": {
    "id": "abc123",
    "state": "REPORT_INGESTED",
    "record": {
      "uid": "http://example.org/session/9ca399834f68",
      "age": 45,
      "sex": 1,
      "labs": {
        "ALB": 40.0,
        "ALP": 50.0,
        "ALT": 9.0,
        "AST": 40.0,
        "BIL": 10.0,
        "CHE": 8.0,
        "CHOL": 5.0,
        "CREA": 70.0,
        "GGT": 20.0,
        "PROT": 70.0
      }
    },
    "diagnosis": "HepatitisC",
    "fired_rules": [
      {
        "rule": "hepatitis_c_screen",
        "head_property": "isHepatitisCpatient",
        "comparisons": [
          "?ast = 40.0 <= 53.05",
          "?alp = 50.0 <= 52.3",
          "?bil = 10.0 <= 11.0",
          "?alt = 9.0 <= 9.25"
        ],
        "bindings": {
          "alp": 50.0,
          "alt": 9.0,
          "ast": 40.0,
          "bil": 10.0,
          "x": "http://example.org/session/9ca399834f68"
        },
        "rendered": "derived <http://example.org/session/9ca399834f68> <http://example.org/liver#isHepatitisCpatient> \"true\"^^<http://www.w3.org/2001/XMLSchema#boolean> . by rule hepatitis_c_screen\n  bindings: ?alp = 50.0, ?alt = 9.0, ?ast = 40.0, ?bil = 10.0, ?x = http://example.org/session/9ca399834f68\n  satisfied: ?ast = 40.0 <= 53.05\n  satisfied: ?alp = 50.0 <= 52.3\n  satisfied: ?bil = 10.0 <= 11.0\n  satisfied: ?alt = 9.0 <= 9.25\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/liver#Patient> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueAST> \"40.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueALP> \"50.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueBIL> \"10.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueALT> \"9.0\"^^<http://www.w3.org/2001/XMLSchema#float> ."
      }
    ],
    "recommended_tests": [
      {
        "test": "HCV RNA confirmation",
        "provenance": "guideline:g1_hcv_rna_diagnosis"
      },
      {
        "test": "Fibrosis staging",
        "provenance": "guideline:g2_standard_treatment_eligibility"
      },
      {
        "test": "Child-Pugh assessment",
        "provenance": "treatment_algorithm:cirrhosis_branch"
      }
    ],
    "report_text": "HCV RNA: POSITIVE\nCHILD-PUGH: A",
    "report_facts": {
      "hcv_rna": "positive",
      "fibrosis_stage": null,
      "child_pugh": "A",
      "ascites": null,
      "decompensated": null,
      "recognized_lines": 2,
      "unrecognized_lines": 0
    },
    "plan": null
  },
  "plan": {
    "state": "TREATMENT_PLANNED",
    "plan": {
      "regimen": [
        {
          "drug": "Sofosbuvir",
          "dose": "400mg",
          "provenance": "treatment_algorithm:compensated_cirrhosis"
        },
        {
          "drug": "Velpatasvir",
          "dose": "100mg",
          "provenance": "treatment_algorithm:compensated_cirrhosis"
        }
      ],
      "duration_weeks": 12,
      "monitoring": [
        {
          "action": "On-treatment review",
          "interval": "every4Weeks",
          "provenance": "guideline:g4_on_treatment_monitoring"
        },
        {
          "action": "HCV RNA test (confirm sustained virological response)",
          "interval": "postTreatment12Weeks",
          "provenance": "guideline:g5_post_treatment_svr_test"
        },
        {
          "action": "Ultrasound (hepatocellular carcinoma screening)",
          "interval": "every6Months",
          "provenance": "guideline:g9_hcc_screening"
        },
        {
          "action": "Upper endoscopy (varices screening)",
          "provenance": "guideline:g10_varices_screening"
        },
        {
          "action": "Hepatic encephalopathy monitoring",
          "provenance": "guideline:g11_encephalopathy_monitoring"
        }
      ],
      "lifestyle": [
        {
          "advice": "Avoid alcohol",
          "provenance": "guideline:g7_lifestyle"
        },
        {
          "advice": "Hepatitis A and B vaccination",
          "provenance": "guideline:g7_lifestyle"
        },
        {
          "advice": "Abstain from alcohol completely",
          "provenance": "guideline:g14_alcohol_abstinence"
        }
      ],
      "referrals": []
    }
  },
  "explanation": {
    "explanation": "Diagnosis: HepatitisC\nFired rules:\n  - hepatitis_c_screen (derives isHepatitisCpatient)\n      satisfied: ?ast = 40.0 <= 53.05\n      satisfied: ?alp = 50.0 <= 52.3\n      satisfied: ?bil = 10.0 <= 11.0\n      satisfied: ?alt = 9.0 <= 9.25\nRecommended tests:\n  - HCV RNA confirmation [guideline:g1_hcv_rna_diagnosis]\n  - Fibrosis staging [guideline:g2_standard_treatment_eligibility]\n  - Child-Pugh assessment [treatment_algorithm:cirrhosis_branch]\nTreatment plan (12 weeks):\n  - Sofosbuvir 400mg [treatment_algorithm:compensated_cirrhosis]\n  - Velpatasvir 100mg [treatment_algorithm:compensated_cirrhosis]\nMonitoring:\n  - On-treatment review (every4Weeks) [guideline:g4_on_treatment_monitoring]\n  - HCV RNA test (confirm sustained virological response) (postTreatment12Weeks) [guideline:g5_post_treatment_svr_test]\n  - Ultrasound (hepatocellular carcinoma screening) (every6Months) [guideline:g9_hcc_screening]\n  - Upper endoscopy (varices screening) [guideline:g10_varices_screening]\n  - Hepatic encephalopathy monitoring [guideline:g11_encephalopathy_monitoring]\nLifestyle:\n  - Avoid alcohol [guideline:g7_lifestyle]\n  - Hepatitis A and B vaccination [guideline:g7_lifestyle]\n  - Abstain from alcohol completely [guideline:g14_alcohol_abstinence]\nCautions: confirm HIV-negative status and non-pregnancy before starting antivirals; review liver function regularly.\n",
    "enhanced": null
  },
  "sessionView": {
    "id": "abc123",
    "state": "TREATMENT_PLANNED",
    "record": {
      "uid": "http://example.org/session/9ca399834f68",
      "age": 45,
      "sex": 1,
      "labs": {
        "ALB": 40.0,
        "ALP": 50.0,
        "ALT": 9.0,
        "AST": 40.0,
        "BIL": 10.0,
        "CHE": 8.0,
        "CHOL": 5.0,
        "CREA": 70.0,
        "GGT": 20.0,
        "PROT": 70.0
      }
    },
    "diagnosis": "HepatitisC",
    "fired_rules": [
      {
        "rule": "hepatitis_c_screen",
        "head_property": "isHepatitisCpatient",
        "comparisons": [
          "?ast = 40.0 <= 53.05",
          "?alp = 50.0 <= 52.3",
          "?bil = 10.0 <= 11.0",
          "?alt = 9.0 <= 9.25"
        ],
        "bindings": {
          "alp": 50.0,
          "alt": 9.0,
          "ast": 40.0,
          "bil": 10.0,
          "x": "http://example.org/session/9ca399834f68"
        },
        "rendered": "derived <http://example.org/session/9ca399834f68> <http://example.org/liver#isHepatitisCpatient> \"true\"^^<http://www.w3.org/2001/XMLSchema#boolean> . by rule hepatitis_c_screen\n  bindings: ?alp = 50.0, ?alt = 9.0, ?ast = 40.0, ?bil = 10.0, ?x = http://example.org/session/9ca399834f68\n  satisfied: ?ast = 40.0 <= 53.05\n  satisfied: ?alp = 50.0 <= 52.3\n  satisfied: ?bil = 10.0 <= 11.0\n  satisfied: ?alt = 9.0 <= 9.25\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://example.org/liver#Patient> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueAST> \"40.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueALP> \"50.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueBIL> \"10.0\"^^<http://www.w3.org/2001/XMLSchema#float> .\n  from asserted fact: <http://example.org/session/9ca399834f68> <http://example.org/liver#hasValueALT> \"9.0\"^^<http://www.w3.org/2001/XMLSchema#float> ."
      }
    ],
    "recommended_tests": [
      {
        "test": "HCV RNA confirmation",
        "provenance": "guideline:g1_hcv_rna_diagnosis"
      },
      {
        "test": "Fibrosis staging",
        "provenance": "guideline:g2_standard_treatment_eligibility"
      },
      {
        "test": "Child-Pugh assessment",
        "provenance": "treatment_algorithm:cirrhosis_branch"
      }
    ],
    "report_text": "HCV RNA: POSITIVE\nCHILD-PUGH: A",
    "report_facts": {
      "hcv_rna": "positive",
      "fibrosis_stage": null,
      "child_pugh": "A",
      "ascites": null,
      "decompensated": null,
      "recognized_lines": 2,
      "unrecognized_lines": 0
    },
    "plan": {
      "regimen": [
        {
          "drug": "Sofosbuvir",
          "dose": "400mg",
          "provenance": "treatment_algorithm:compensated_cirrhosis"
        },
        {
          "drug": "Velpatasvir",
          "dose": "100mg",
          "provenance": "treatment_algorithm:compensated_cirrhosis"
        }
      ],
      "duration_weeks": 12,
      "monitoring": [
        {
          "action": "On-treatment review",
          "interval": "every4Weeks",
          "provenance": "guideline:g4_on_treatment_monitoring"
        },
        {
          "action": "HCV RNA test (confirm sustained virological response)",
          "interval": "postTreatment12Weeks",
          "provenance": "guideline:g5_post_treatment_svr_test"
        },
        {
          "action": "Ultrasound (hepatocellular carcinoma screening)",
          "interval": "every6Months",
          "provenance": "guideline:g9_hcc_screening"
        },
        {
          "action": "Upper endoscopy (varices screening)",
          "provenance": "guideline:g10_varices_screening"
        },
        {
          "action": "Hepatic encephalopathy monitoring",
          "provenance": "guideline:g11_encephalopathy_monitoring"
        }
      ],
      "lifestyle": [
        {
          "advice": "Avoid alcohol",
          "provenance": "guideline:g7_lifestyle"
        },
        {
          "advice": "Hepatitis A and B vaccination",
          "provenance": "guideline:g7_lifestyle"
        },
        {
          "advice": "Abstain from alcohol completely",
          "provenance": "guideline:g14_alcohol_abstinence"
        }
      ],
      "referrals": []
    }
  }
} as const;
