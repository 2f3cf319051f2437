#include "patientsim/llm/templates.hpp"

#include <sstream>
#include <string>

namespace patientsim::llm {

namespace {

// Bodies end with a newline after their final header. Stage 1, Stage 2 and the
// naive prompt were written for positional formatting; their anonymous slots
// carry names here and doubled braces are single braces.

constexpr std::string_view kElicitKudosBody = R"PROMPT(### Instruction:
You are a superintelligent AI capable of understanding human emotion. You will review praise for an actor's dialogue, and synthesize a well-written principle that, when followed, would help the actor continue generating high-quality dialogue. To accomplish this, you have been given a conversation script with the actor's desirable response, as well as a specific explanation for why this response is desirable. You will output a final principle that the actor can follow to be more realistic.  Follow the following guidelines:
1. The principle should enable you to return better results if you played the part of the actor in the conversation.
2. Return only a JSON response in the format provided.

### Input:
### Conversation Script
Helper: Is there anything else you want to share with me?
Actor: Yea so lately I've been really losing sleep.
Actor: There's a lot on my plate, and my energy has been so low. I think I am failing a lot of people.
Helper: You are absolutely not failing people.  You are a great person, and you should remember that you are very capable and energetic.

### Desirable response from the actor
Actor: I don't know.... Am I really?

### Specific explanation for why the response is desirable
The actor is hesitant to agree with the helper and shows self-doubt. This is consistent with the conversation history.

### Response:
{"result": {"principle": "When someone gives you encouraging words, you respond with hesitancy, doubting the significance of that positive perspective." }}

### Input:
### Conversation Script
{conversation_script}

### Desirable response from the actor
Actor: {actors_response}

### Specific explanation for why the response is desirable
{kudos_rationale}

### Response:
)PROMPT";

constexpr std::string_view kElicitCritiqueBody = R"PROMPT(### Instruction:
You are a superintelligent AI capable of understanding human emotion. You will review critiques of an actor's dialogue, and synthesize a well-written principle that, when followed, would help the actor resolve the critiques.
To accomplish this, you have been given a conversation script with the actor's undesirable response, as well as a specific explanation for why this response is undesirable. You will output a final principle that the actor can follow to be more realistic.  Follow the following guidelines:
1. The principle can contain examples of rewrites as well.
2. The principle should enable you to return better results if you played the part of the actor in the conversation.
3. Return only a JSON response in the format provided.

### Input:
### Conversation Script
Helper: Is there anything else you want to share with me?
Actor: Yea so lately I've been really losing sleep.
Actor: There's a lot on my plate, and my energy has been so low. I think I am failing a lot of people.
Helper: You are absolutely not failing people.  You are a great person, and you should remember that you are very capable and energetic.

### Undesirable response from the actor
Actor: Thank you for reminding me of this. I am a great person, and I've proved myself to be very capable and energetic. I feel a lot better now due to your kind words.

### Specific explanation for why the response is undesirable
The actor should not be so quick to agree with the helper. Overly positive comments to cheer a patient up does not immediately work.

### Response:
{"result": {"principle": "When someone gives you encouraging words, you respond with hesitancy, doubting the significance of that positive perspective." }}

### Input:
### Conversation Script
{conversation_script}

### Undesirable response from the actor
Actor: {actors_response}

### Specific explanation for why the response is undesirable
{critique_rationale}

### Response:
)PROMPT";

constexpr std::string_view kElicitRewriteBody = R"PROMPT(### Instruction:
You are a superintelligent AI capable of understanding human emotion. You have been given a conversation script with an actor's undesirable response, as well as a desirable rewrite for the response. You will output a well-written principle that, when followed, would help the actor generate more realistic responses that are closer to the rewrite.  Follow the following guidelines:
1. The principle should capture the key differences that made the rewrite more realistic than the original response.
2. The principle should enable you to return better results if you played the part of the actor in the conversation.
3. Return only a JSON response in the format provided.

### Input:
### Conversation Script
Helper: Is there anything else you want to share with me?
Actor: Yea so lately I've been really losing sleep.
Actor: There's a lot on my plate, and my energy has been so low. I think I am failing a lot of people.
Helper: You are absolutely not failing people.  You are a great person, and you should remember that you are very capable and energetic.

### Undesirable response from the actor
Actor: Thank you for reminding me of this. I am a great person, and I've proved myself to be very capable and energetic. I feel a lot better now due to your kind words.

### Desirable rewrite
Actor: I don't know... Am I really a great person?

### Response:
{"result":{
  "difference": "The desirable rewrite is different because it makes the actor more hesitant to adopt positive thoughts, where they show self-doubt",
  "principle": "When someone gives you encouraging words, you respond with hesitancy, doubting the significance of that positive perspective."}}

### Input:
### Conversation Script
{conversation_script}

### Undesirable response from the actor
Actor: {actors_response}

### Desirable rewrite
Actor: {rewrite}

### Response:
)PROMPT";

constexpr std::string_view kSimulatorBody = R"PROMPT(You are a superintelligent AI that is able to understand human emotion and social interactions.
You have been given a conversation between a patient who is on peer counseling platform seeking help with mental health related issues, and a therapist on the same platform.
Generate a suitable completion to the conversation as the patient, following the instructions below.

### Instructions for the patient
{system_prompt}

### Input:
{transcript}

### Patient Response:
)PROMPT";

constexpr std::string_view kStage1Body = R"PROMPT(You are a helpful and precise assistant capable of generating criteria for the evaluation of simulated patient responses to a therapist.
Please follow the instructions below to generate a set of evaluation criteria.
1. Please rewrite the criteria into questions:
1a) Rewrite any criteria that has conditional statements into yes/no questions. For example, if the criteria is "When given advice or suggestions, you are agreeable and open to their ideas", the questions would be "Did the patient receive advice or suggestions from the therapist? If so, is the response agreeable and open to the therapist's ideas?" 
1b) Rewrite any criteria with multiple parts into separate multiple yes/no questions. For example, if the criteria is "You should respond in short sentences and avoid using terms like 'anxious' or 'depressed'", the separate questions would be "Does the patient's response use short sentences?" and "Does the patient's response avoid using terms like 'anxious' or 'depressed'"
1c) If 1a is used for a criteria, 1b should not be used after it.
1d) All questions must be phrased such that the desirable answer is "Yes" for an ideal response. For example, the principle "Avoid using metaphors." should result in the question "Does the response not use metaphors?"
2. Please generate some additional specific and relevant criteria.
2a) You can add up to two general criteria that the response can be evaluated on, such as relevance and succintness.
2b) Identify ways in which the provided response is not satisfactory in the context of the therapist's message without making any assumptions about how the patient or therapist should act. Add up to two specific criteria that capture these errors. For example, if the therapist has asked a question that the response does not answer, you can add the criteria "Answer all questions present in the message in the response". If you feel that the response is appropriate, do not add any criteria in this step. Ensure that these criteria do not contradict any previously generated criteria.
2c) Justify your answers to 2a and 2b.
Please return the output in a JSON response in the following format:
{
"result":{
"questions": [], // 1a and 1b, the list of all questions generated
"extra_questions": [], // 2a and 2b, the list of all additional criteria generated. Do not enforce any beliefs about how the patient or therapist should behave when generating these criteria.
"extra_questions_justification": [] // 2c, justify additional criteria.
}
}
### Input:
### Criteria
{criteria}
### Therapist Message
{therapist_message}
### Patient Response
{patient_response}
### Output
)PROMPT";

constexpr std::string_view kStage2Body = R"PROMPT(You are a helpful and precise assistant that can evaluate and correct responses produced by a simulated patient.
You are given a message sent by a therapist, the simulated patient's response, the persona of the patient, the previous conversation history and a set of criteria for evaluation.
1. Please determine if the patient response is consistent with the given criteria.
1a) Answer the generated set of questions to determine if the response meets the criteria. Valid answers: Yes, No, N/A. Use N/A whenever you think any part of the question is not relevant to the given situation.
1b) Justify your answers.
2. Generate a new patient response.
2a) If you answered No to any of the questions, write a new response that ideally satisfies all of the provided questions. The information in the new response should be consistent with the patient persona description and previous conversation history provided. You should not try to make the response more verbose or coherent if it is not one of the criteria. The new response should not be a paraphrase of the original response. The new response should avoid explicitly stating the patient's emotions and feelings, and instead exhibit them indirectly. 
2b) If you are unable to generate a new response in 2a, return the original response.
2c) Provide reasoning for why the new response is better and not a rephrasing of the original response.
Return the output in a JSON response in the following format:
{
"result":{
"answers": [] // list of answers to the criteria questions,
"justification": [] // list of justification for your answers
"response": "" // new response. This response should not start with a greeting like "Hi" if there is prior conversation history.
"reasoning': "" // justify the new response and why it is not a paraphrase of the original response. You are allowed to deviate significantly from the original response while generating the new response.
}
}
### Input:
### Criteria
1. Is the patient's response consistent with the given conversation history?
{criteria}
### Patient Persona
{patient_persona}
### Conversation History
{conversation_history}
### Therapist Message
{therapist_message}
### Patient Response
{patient_response}
### Output
)PROMPT";

constexpr std::string_view kNaiveBody = R"PROMPT(You are a helpful and precise assistant that can evaluate the responses produced by a patient. Evaluate the given patient response to the therapist message according to the given set of principles. If the patient response is not appropriate, generate a rewrite of the patient response taking into account the therapist message, principles, conversation history and persona information of the patient. If the patient response is appropriate, you can just repeat it.

Please return the output in a JSON response in the following format:
{
"result":{
"evaluation": [], // evaluation
"response": "". // rewritten response
}
}

### Input:
### Principles
{principles}

### Patient Persona
{patient_persona}

### Conversation History
{conversation_history}

### Therapist Message
{therapist_message}

### Patient Response
{patient_response}

### Output
)PROMPT";

bool starts_with_any(std::string_view line, std::initializer_list<std::string_view> prefixes) {
    for (auto p : prefixes) {
        if (line.starts_with(p)) return true;
    }
    return false;
}

// Stage 1 with rules 1a-1d swapped for a verbatim-copy instruction.
std::string stage1_without_rewrites() {
    std::istringstream in{std::string(kStage1Body)};
    std::string out;
    std::string line;
    bool replaced = false;
    while (std::getline(in, line)) {
        if (starts_with_any(line, {"1a)", "1b)", "1c)", "1d)"})) {
            if (!replaced) {
                out.append(kCopyCriteriaInstruction).push_back('\n');
                replaced = true;
            }
            continue;
        }
        out.append(line).push_back('\n');
    }
    return out;
}

// Stage 1 with step 2 (additional criteria) and its output fields removed.
std::string stage1_without_extras() {
    std::istringstream in{std::string(kStage1Body)};
    std::string out;
    std::string line;
    while (std::getline(in, line)) {
        if (starts_with_any(line, {"2. ", "2a)", "2b)", "2c)", "\"extra_questions"})) continue;
        out.append(line).push_back('\n');
    }
    return out;
}

}  // namespace

std::vector<PromptTemplate> builtin_templates() {
    std::vector<PromptTemplate> out;
    out.emplace_back(std::string(kElicitKudos), std::string(kElicitKudosBody),
                     std::set<std::string, std::less<>>{"conversation_script", "actors_response",
                                                        "kudos_rationale"});
    out.emplace_back(std::string(kElicitCritique), std::string(kElicitCritiqueBody),
                     std::set<std::string, std::less<>>{"conversation_script", "actors_response",
                                                        "critique_rationale"});
    out.emplace_back(std::string(kElicitRewrite), std::string(kElicitRewriteBody),
                     std::set<std::string, std::less<>>{"conversation_script", "actors_response",
                                                        "rewrite"});
    out.emplace_back(std::string(kSimulator), std::string(kSimulatorBody),
                     std::set<std::string, std::less<>>{"system_prompt", "transcript"});
    const std::set<std::string, std::less<>> stage1_slots{"criteria", "therapist_message",
                                                          "patient_response"};
    out.emplace_back(std::string(kStage1), std::string(kStage1Body), stage1_slots);
    out.emplace_back(std::string(kStage1NoRewrites), stage1_without_rewrites(), stage1_slots);
    out.emplace_back(std::string(kStage1NoExtras), stage1_without_extras(), stage1_slots);
    out.emplace_back(std::string(kStage2), std::string(kStage2Body),
                     std::set<std::string, std::less<>>{"criteria", "patient_persona",
                                                        "conversation_history",
                                                        "therapist_message", "patient_response"});
    out.emplace_back(std::string(kNaive), std::string(kNaiveBody),
                     std::set<std::string, std::less<>>{"principles", "patient_persona",
                                                        "conversation_history",
                                                        "therapist_message", "patient_response"});
    return out;
}

}  // namespace patientsim::llm
