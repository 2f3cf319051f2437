#include "patientsim/simulator/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>

#include "patientsim/core/transcript.hpp"
#include "patientsim/llm/templates.hpp"

namespace patientsim::simulator {

using llm::json;

namespace {

std::string transcript_with_message(const GenerationContext& ctx) {
    std::string out = render_script(ctx.history, kSimulationLabels);
    if (!out.empty()) out.push_back('\n');
    out += fmt::format("{}: {}", kSimulationLabels.counselor, ctx.counselor_message);
    return out;
}

std::vector<std::string> string_list(const json& value, std::string_view field) {
    if (!value.is_array()) throw ValidationError(fmt::format("'{}' must be a list", field));
    std::vector<std::string> out;
    for (const auto& item : value) {
        if (!item.is_string()) throw ValidationError(fmt::format("'{}' must hold strings", field));
        out.push_back(item.get<std::string>());
    }
    return out;
}

// Justifications may be a list or one joint string; kept verbatim.
std::vector<std::string> justification_list(const json& result, const char* field) {
    auto it = result.find(field);
    if (it == result.end() || it->is_null()) return {};
    std::vector<std::string> out;
    if (it->is_array()) {
        for (const auto& item : *it) out.push_back(item.is_string() ? item.get<std::string>() : item.dump());
    } else {
        out.push_back(it->is_string() ? it->get<std::string>() : it->dump());
    }
    return out;
}

std::string text_or_dump(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_array()) {
        std::string out;
        for (const auto& item : value) {
            if (!out.empty()) out.push_back('\n');
            out += item.is_string() ? item.get<std::string>() : item.dump();
        }
        return out;
    }
    return value.is_null() ? std::string{} : value.dump();
}

std::set<std::string> word_set(std::string_view text) {
    static const std::set<std::string> kStop = {
        "a", "an", "the", "and", "or", "to", "of", "in", "on", "is", "are", "you", "your", "does",
        "do", "did", "patient", "patient's", "response", "s", "it", "if", "so", "be", "with", "that"};
    std::set<std::string> out;
    std::string word;
    auto flush = [&] {
        if (!word.empty() && !kStop.contains(word)) out.insert(word);
        word.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
            word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

RefinementTrace unrefined_trace(std::string trace_id, PipelineVariant variant, const std::string& candidate) {
    RefinementTrace t;
    t.trace_id = std::move(trace_id);
    t.variant = variant;
    t.initial_response = candidate;
    t.final_response = candidate;
    t.rewritten = false;
    return t;
}

}  // namespace

void GenerationContext::validate() const {
    scenario.validate();
    if (is_blank(counselor_message)) throw ValidationError("counselor message must not be empty");
    validate_transcript(history, false);
}

std::string patient_instructions(const PersonaScenario& scenario, const Constitution& constitution) {
    std::string out = scenario.scenario_text;
    if (!constitution.principles.empty()) {
        auto texts = principle_texts(constitution);
        out += "\n\n" + numbered_list(texts);
    }
    return out;
}

std::vector<std::string> attribute_questions(const std::vector<std::string>& questions,
                                             const std::vector<Principle>& principles) {
    std::vector<std::string> out;
    if (principles.empty()) return out;
    std::vector<std::set<std::string>> principle_words;
    for (const auto& p : principles) principle_words.push_back(word_set(p.text));
    for (const auto& q : questions) {
        auto qw = word_set(q);
        std::size_t best = 0;
        double best_score = -1.0;
        for (std::size_t i = 0; i < principles.size(); ++i) {
            const auto& pw = principle_words[i];
            std::size_t shared = 0;
            for (const auto& w : qw) shared += pw.contains(w) ? 1 : 0;
            std::size_t uni = qw.size() + pw.size() - shared;
            double score = uni == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(uni);
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        out.push_back(principles[best].id);
    }
    return out;
}

Simulator::Simulator(llm::Gateway& gateway, llm::ModelRouting routing, IdGenerator& ids)
    : gateway_(gateway), routing_(std::move(routing)), ids_(ids) {}

llm::CompletionRequest Simulator::base_request(const GenerationContext& ctx) const {
    return gateway_.make_request(llm::kSimulator,
                                 {{"system_prompt", patient_instructions(ctx.scenario, ctx.constitution)},
                                  {"transcript", transcript_with_message(ctx)}},
                                 routing_.settings(llm::CallRole::simulator));
}

llm::CompletionRequest Simulator::stage1_request(const Constitution& constitution,
                                                 std::string_view counselor_message,
                                                 std::string_view candidate, Stage1Mode mode) const {
    std::string_view name = llm::kStage1;
    if (mode == Stage1Mode::no_principle_rewrites) name = llm::kStage1NoRewrites;
    if (mode == Stage1Mode::no_autogenerated_criteria) name = llm::kStage1NoExtras;
    auto texts = principle_texts(constitution);
    return gateway_.make_request(name,
                                 {{"criteria", numbered_list(texts)},
                                  {"therapist_message", std::string(counselor_message)},
                                  {"patient_response", std::string(candidate)}},
                                 routing_.settings(llm::CallRole::stage1));
}

llm::CompletionRequest Simulator::stage2_request(const GenerationContext& ctx, std::string_view candidate,
                                                 const QuestionSet& qs) const {
    std::vector<std::string> questions;
    for (const auto& q : qs.rewritten_questions) questions.push_back(q.text);
    for (const auto& q : qs.extra_questions) questions.push_back(q.text);
    // Item 1 is the fixed consistency question in the template body.
    return gateway_.make_request(llm::kStage2,
                                 {{"criteria", numbered_list(questions, 2)},
                                  {"patient_persona", ctx.scenario.scenario_text},
                                  {"conversation_history", render_script(ctx.history, kSimulationLabels)},
                                  {"therapist_message", ctx.counselor_message},
                                  {"patient_response", std::string(candidate)}},
                                 routing_.settings(llm::CallRole::stage2));
}

llm::CompletionRequest Simulator::naive_request(const GenerationContext& ctx, std::string_view candidate) const {
    auto texts = principle_texts(ctx.constitution);
    return gateway_.make_request(llm::kNaive,
                                 {{"principles", numbered_list(texts)},
                                  {"patient_persona", ctx.scenario.scenario_text},
                                  {"conversation_history", render_script(ctx.history, kSimulationLabels)},
                                  {"therapist_message", ctx.counselor_message},
                                  {"patient_response", std::string(candidate)}},
                                 routing_.settings(llm::CallRole::naive));
}

std::string Simulator::generate_base(const GenerationContext& ctx, llm::CallLog& log) {
    ctx.validate();
    auto request = base_request(ctx);
    std::string raw;
    for (int ask = 0; ask < 2; ++ask) {
        raw = gateway_.complete(request, log);
        auto text = strip_role_prefixes(raw);
        if (!text.empty()) return text;
    }
    throw ExtractionError("simulator returned an empty patient response", raw);
}

QuestionSet Simulator::stage1_questions(const Constitution& constitution, std::string_view counselor_message,
                                        std::string_view candidate, llm::CallLog& log, Stage1Mode mode) {
    if (is_blank(candidate)) throw ValidationError("candidate response must not be empty");
    const bool want_extras = mode != Stage1Mode::no_autogenerated_criteria;
    std::vector<std::string> fields{"questions"};
    if (want_extras) fields.emplace_back("extra_questions");

    auto request = stage1_request(constitution, counselor_message, candidate, mode);
    json result = gateway_.complete_payload(request, fields, log, [&](const json& r) {
        string_list(r.at("questions"), "questions");
        if (want_extras) string_list(r.at("extra_questions"), "extra_questions");
    });

    QuestionSet qs;
    if (mode == Stage1Mode::no_principle_rewrites) {
        for (const auto& p : constitution.principles) {
            qs.rewritten_questions.push_back({p.text, QuestionSource::rewritten, p.id});
        }
    } else if (!constitution.principles.empty()) {
        std::vector<std::string> texts;
        for (auto& q : string_list(result.at("questions"), "questions")) {
            if (!is_blank(q)) texts.push_back(trim(q));
        }
        auto owners = attribute_questions(texts, constitution.principles);
        for (std::size_t i = 0; i < texts.size(); ++i) {
            qs.rewritten_questions.push_back({texts[i], QuestionSource::rewritten, owners[i]});
        }
    }
    if (want_extras) {
        for (auto& q : string_list(result.at("extra_questions"), "extra_questions")) {
            if (is_blank(q)) continue;
            if (qs.extra_questions.size() == QuestionSet::kMaxExtraQuestions) break;
            qs.extra_questions.push_back({trim(q), QuestionSource::autogenerated, std::nullopt});
        }
        qs.extra_justifications = justification_list(result, "extra_questions_justification");
    }
    return qs;
}

RefinementTrace Simulator::stage2_evaluate_refine(const GenerationContext& ctx, std::string_view candidate,
                                                  const QuestionSet& qs, llm::CallLog& log) {
    RefinementTrace trace;
    trace.initial_response = std::string(candidate);
    trace.questions.push_back(
        {std::string(kContextConsistencyQuestion), QuestionSource::fixed_context_consistency, std::nullopt});
    trace.questions.insert(trace.questions.end(), qs.rewritten_questions.begin(), qs.rewritten_questions.end());
    trace.questions.insert(trace.questions.end(), qs.extra_questions.begin(), qs.extra_questions.end());
    trace.extra_justifications = qs.extra_justifications;
    const std::size_t expected = trace.questions.size();

    auto request = stage2_request(ctx, candidate, qs);
    std::vector<Verdict> verdicts;
    const std::vector<std::string> fields{"answers", "response"};
    json result = gateway_.complete_payload(request, fields, log, [&](const json& r) {
        auto answers = string_list(r.at("answers"), "answers");
        if (answers.size() != expected) {
            throw ValidationError(
                fmt::format("expected {} answers, provider returned {}", expected, answers.size()));
        }
        auto it = r.find("justification");
        if (it == r.end() || !it->is_array() || it->size() != expected) {
            throw ValidationError(fmt::format("expected {} justifications", expected));
        }
        if (!r.at("response").is_string()) throw ValidationError("'response' must be a string");
        verdicts.clear();
        for (std::size_t i = 0; i < expected; ++i) {
            auto answer = parse_answer(answers[i]);
            if (!answer) throw ValidationError(fmt::format("invalid answer '{}'", answers[i]));
            Verdict v{*answer, text_or_dump((*it)[i])};
            v.validate();
            verdicts.push_back(std::move(v));
        }
    });
    trace.verdicts = std::move(verdicts);
    trace.rewritten = std::any_of(trace.verdicts.begin(), trace.verdicts.end(),
                                  [](const Verdict& v) { return v.answer == Answer::no; });
    if (trace.rewritten) {
        auto rewrite = strip_role_prefixes(result.at("response").get<std::string>());
        trace.final_response = rewrite.empty() ? trace.initial_response : rewrite;
    } else {
        // The provider may paraphrase even when nothing failed; keep the candidate.
        trace.final_response = trace.initial_response;
    }
    if (auto it = result.find("reasoning"); it != result.end()) {
        trace.reasoning = text_or_dump(*it);
    } else if (auto alt = result.find("reasoning'"); alt != result.end()) {
        trace.reasoning = text_or_dump(*alt);
    }
    return trace;
}

RefinementTrace Simulator::naive_refine(const GenerationContext& ctx, std::string_view candidate,
                                        llm::CallLog& log) {
    RefinementTrace trace;
    trace.variant = PipelineVariant::naive;
    trace.initial_response = std::string(candidate);
    auto request = naive_request(ctx, candidate);
    const std::vector<std::string> fields{"response"};
    json result = gateway_.complete_payload(request, fields, log, [](const json& r) {
        if (!r.at("response").is_string()) throw ValidationError("'response' must be a string");
    });
    auto returned = strip_role_prefixes(result.at("response").get<std::string>());
    const bool differs = !returned.empty() && returned != trim(candidate);
    trace.rewritten = differs;
    trace.final_response = differs ? returned : trace.initial_response;

    std::string evaluation = result.contains("evaluation") ? text_or_dump(result.at("evaluation")) : "";
    if (is_blank(evaluation)) evaluation = differs ? "Response rewritten." : "Response repeated unchanged.";
    trace.questions.push_back({std::string(kNaiveQuestion), QuestionSource::naive_overall, std::nullopt});
    trace.verdicts.push_back({differs ? Answer::no : Answer::yes, evaluation});
    return trace;
}

Reply Simulator::refine(PipelineVariant variant, const GenerationContext& ctx, const std::string& candidate,
                        llm::CallLog& log, std::string trace_id) {
    RefinementTrace trace;
    try {
        switch (variant) {
        case PipelineVariant::no_critique:
            trace = unrefined_trace(trace_id, variant, candidate);
            break;
        case PipelineVariant::naive:
            trace = naive_refine(ctx, candidate, log);
            break;
        case PipelineVariant::full:
        case PipelineVariant::no_principle_rewrites:
        case PipelineVariant::no_autogenerated_criteria: {
            Stage1Mode mode = Stage1Mode::full;
            if (variant == PipelineVariant::no_principle_rewrites) mode = Stage1Mode::no_principle_rewrites;
            if (variant == PipelineVariant::no_autogenerated_criteria) {
                mode = Stage1Mode::no_autogenerated_criteria;
            }
            auto qs = stage1_questions(ctx.constitution, ctx.counselor_message, candidate, log, mode);
            trace = stage2_evaluate_refine(ctx, candidate, qs, log);
            break;
        }
        }
    } catch (const ProviderError& e) {
        trace = unrefined_trace(trace_id, variant, candidate);
        trace.error = fmt::format("refinement failed, base response kept: {}", e.what());
    } catch (const ExtractionError& e) {
        trace = unrefined_trace(trace_id, variant, candidate);
        trace.error = fmt::format("refinement failed, base response kept: {}", e.what());
    }
    trace.trace_id = std::move(trace_id);
    trace.variant = variant;
    trace.calls = log.records();
    Reply reply{trace.final_response, std::move(trace)};
    return reply;
}

Reply Simulator::respond(PipelineVariant variant, const GenerationContext& ctx) {
    ctx.validate();
    llm::CallLog log;
    std::string trace_id = ids_.next();
    std::string base;
    try {
        base = generate_base(ctx, log);
    } catch (const ProviderError& e) {
        auto trace = unrefined_trace(trace_id, variant, "");
        trace.error = e.what();
        trace.calls = log.records();
        throw GenerationFailed(fmt::format("patient generation failed: {}", e.what()), std::move(trace));
    } catch (const ExtractionError& e) {
        auto trace = unrefined_trace(trace_id, variant, "");
        trace.error = e.what();
        trace.calls = log.records();
        throw GenerationFailed(fmt::format("patient generation failed: {}", e.what()), std::move(trace));
    }
    return refine(variant, ctx, base, log, std::move(trace_id));
}

}  // namespace patientsim::simulator
