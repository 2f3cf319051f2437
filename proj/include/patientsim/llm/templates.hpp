#pragma once

#include <string_view>
#include <vector>

#include "patientsim/llm/prompt_template.hpp"

namespace patientsim::llm {

// Built-in template names.
inline constexpr std::string_view kElicitKudos = "elicit_kudos";
inline constexpr std::string_view kElicitCritique = "elicit_critique";
inline constexpr std::string_view kElicitRewrite = "elicit_rewrite";
inline constexpr std::string_view kSimulator = "simulator";
inline constexpr std::string_view kStage1 = "stage1_questions";
inline constexpr std::string_view kStage1NoRewrites = "stage1_questions_no_rewrites";
inline constexpr std::string_view kStage1NoExtras = "stage1_questions_no_extras";
inline constexpr std::string_view kStage2 = "stage2_evaluate_refine";
inline constexpr std::string_view kNaive = "naive_refine";

// Replaces the 1a-1d rewrite rules of the Stage 1 instructions.
inline constexpr std::string_view kCopyCriteriaInstruction =
    "Copy each criterion verbatim as a single question.";

// All nine templates: the seven pipeline prompts plus the two Stage 1
// ablations derived from the Stage 1 body.
std::vector<PromptTemplate> builtin_templates();

}  // namespace patientsim::llm
