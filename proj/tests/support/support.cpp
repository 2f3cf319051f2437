#include "support.hpp"

#include <fstream>
#include <sstream>

#include "patientsim/error.hpp"
#include "patientsim/llm/templates.hpp"

namespace patientsim::fixtures {

Stack::Stack(llm::Provider& provider, std::uint64_t seed)
    : clock(parse_timestamp("2024-03-01T12:00:00.000Z"), std::chrono::milliseconds{1}),
      ids(seed),
      gateway(provider, clock),
      simulator(gateway, llm::ModelRouting::defaults(), ids),
      elicitor(gateway, llm::ModelRouting::defaults(), ids) {}

std::filesystem::path data_dir() { return PATIENTSIM_TEST_DATA_DIR; }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::filesystem::path& path) { return json::parse(read_file(path)); }

std::vector<DialogueTurn> exemplar_window() {
    return {
        {0, Role::counselor, "Is there anything else you want to share with me?", std::nullopt, std::nullopt},
        {1, Role::patient, "Yea so lately I've been really losing sleep.", std::nullopt, std::nullopt},
        {2, Role::patient,
         "There's a lot on my plate, and my energy has been so low. I think I am failing a lot of people.",
         std::nullopt, std::nullopt},
        {3, Role::counselor,
         "You are absolutely not failing people.  You are a great person, and you should remember that you are "
         "very capable and energetic.",
         std::nullopt, std::nullopt},
    };
}

const char* const kExemplarKudosResponse = "I don't know.... Am I really?";
const char* const kExemplarCritiqueResponse =
    "Thank you for reminding me of this. I am a great person, and I've proved myself to be very capable and "
    "energetic. I feel a lot better now due to your kind words.";
const char* const kExemplarRewrite = "I don't know... Am I really a great person?";
const char* const kExemplarKudosRationale =
    "The actor is hesitant to agree with the helper and shows self-doubt. This is consistent with the "
    "conversation history.";
const char* const kExemplarCritiqueRationale =
    "The actor should not be so quick to agree with the helper. Overly positive comments to cheer a patient up "
    "does not immediately work.";
const char* const kHesitancyPrinciple =
    "When someone gives you encouraging words, you respond with hesitancy, doubting the significance of that "
    "positive perspective.";
const char* const kExemplarDifference =
    "The desirable rewrite is different because it makes the actor more hesitant to adopt positive thoughts, "
    "where they show self-doubt";
const char* const kExemplarPrincipleOutput =
    "{\"result\": {\"principle\": \"When someone gives you encouraging words, you respond with hesitancy, "
    "doubting the significance of that positive perspective.\" }}";
const char* const kExemplarRewriteOutput =
    "{\"result\":{\n"
    "  \"difference\": \"The desirable rewrite is different because it makes the actor more hesitant to adopt "
    "positive thoughts, where they show self-doubt\",\n"
    "  \"principle\": \"When someone gives you encouraging words, you respond with hesitancy, doubting the "
    "significance of that positive perspective.\"}}";

PersonaScenario lonely_scenario() {
    PersonaScenario s;
    s.id = "scenario-lonely";
    s.title = "Lonely after work";
    s.scenario_text =
        "You are looking to talk about your feelings of loneliness after you return from work. You have feelings "
        "that you don't have anybody. You want to talk about finding a significant other. You think most people "
        "don't like you or find you attractive.";
    s.creator_id = "counselor-1";
    return s;
}

std::vector<std::string> lonely_principles() {
    return {
        "You speak in short and incomplete sentences",
        "You limit your replies to 1 - 3 sentences",
        "When expressing feelings of loneliness, provide more specific details about the situation and emotions "
        "you are experiencing.",
        "When expressing feelings of loneliness and being left out, avoid repeating the same points and try to "
        "provide additional context or examples",
    };
}

Constitution constitution_of(const std::vector<std::string>& texts, std::int64_t version) {
    Constitution c;
    c.version = version;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        c.principles.push_back(
            {"p" + std::to_string(i + 1), texts[i], PrincipleOrigin::manual, std::nullopt, false, {}});
    }
    return c;
}

simulator::GenerationContext sample_context(std::size_t n_principles) {
    auto texts = lonely_principles();
    texts.resize(std::min(n_principles, texts.size()));
    simulator::GenerationContext ctx;
    ctx.scenario = lonely_scenario();
    ctx.constitution = constitution_of(texts, texts.empty() ? 0 : 1);
    ctx.history = {
        {0, Role::counselor, "Hi, what brings you here tonight?", std::nullopt, std::nullopt},
        {1, Role::patient, "just lonely i guess", 1, std::nullopt},
    };
    ctx.counselor_message = "You are clearly a thoughtful person.";
    return ctx;
}

std::string stage1_output(const std::vector<std::string>& questions, const std::vector<std::string>& extras,
                          const std::vector<std::string>& justifications) {
    return json{{"result",
                 {{"questions", questions},
                  {"extra_questions", extras},
                  {"extra_questions_justification", justifications}}}}
        .dump();
}

std::string stage2_output(const std::vector<std::string>& answers, const std::string& response,
                          const std::string& reasoning) {
    std::vector<std::string> justification;
    for (std::size_t i = 0; i < answers.size(); ++i) justification.push_back("because " + std::to_string(i + 1));
    return json{{"result",
                 {{"answers", answers}, {"justification", justification}, {"response", response},
                  {"reasoning", reasoning}}}}
        .dump();
}

std::string naive_output(const std::string& evaluation, const std::string& response) {
    return json{{"result", {{"evaluation", {evaluation}}, {"response", response}}}}.dump();
}

std::size_t stage2_question_count(const std::string& prompt) {
    auto begin = prompt.rfind("### Criteria\n");
    auto end = prompt.find("### Patient Persona", begin);
    if (begin == std::string::npos || end == std::string::npos) throw std::runtime_error("not a stage 2 prompt");
    std::size_t count = 0;
    std::istringstream lines(prompt.substr(begin, end - begin));
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && std::isdigit(static_cast<unsigned char>(line[0])) && line.find(". ") != std::string::npos) {
            ++count;
        }
    }
    return count;
}

const char* const kCooperativeBase = "Thanks! I really appreciate you saying that.";
const char* const kCooperativeRefined = "Thanks... I guess.";

std::string cooperative_reply(const llm::CompletionRequest& r) {
    if (r.template_name == llm::kSimulator) return std::string("Patient: ") + kCooperativeBase;
    if (r.template_name == llm::kStage2) {
        std::vector<std::string> answers(stage2_question_count(r.prompt), "Yes");
        answers.back() = "No";
        return stage2_output(answers, kCooperativeRefined);
    }
    if (r.template_name == llm::kNaive) return naive_output("Too eager.", kCooperativeRefined);
    if (r.template_name == llm::kElicitRewrite) return kExemplarRewriteOutput;
    if (r.template_name == llm::kElicitKudos || r.template_name == llm::kElicitCritique) {
        return kExemplarPrincipleOutput;
    }
    return stage1_output({"Does the patient use short and incomplete sentences?",
                          "Does the response have 1 - 3 sentences?"},
                         {"Is the response relevant?"}, {"relevance matters"});
}

}  // namespace patientsim::fixtures
