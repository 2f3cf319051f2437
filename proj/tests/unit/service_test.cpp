#include <gtest/gtest.h>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "patientsim/llm/templates.hpp"
#include "patientsim/session/event_store.hpp"
#include "patientsim/session/service.hpp"
#include "support.hpp"

using namespace patientsim;
using namespace patientsim::session;
namespace fx = patientsim::fixtures;

namespace {

// Cooperative provider with switches to fail individual templates.
struct Harness {
    explicit Harness(EventStore& store, PipelineVariant variant = PipelineVariant::full)
        : provider([this](const llm::CompletionRequest& r) {
              if (fail_base && r.template_name == llm::kSimulator) {
                  throw ProviderError(ProviderError::Kind::transport, "down");
              }
              if (fail_elicitation && r.template_name.starts_with("elicit_")) return std::string("nonsense");
              return fx::cooperative_reply(r);
          }),
          stack(provider),
          service(store, stack.simulator, stack.elicitor, stack.ids, stack.clock, ServiceOptions{variant}) {}

    bool fail_base = false;
    bool fail_elicitation = false;
    fx::CallbackProvider provider;
    fx::Stack stack;
    SessionService service;
};

FeedbackItem kudos(int turn, std::string rationale = "Nice hesitancy.") {
    FeedbackItem f;
    f.kind = FeedbackKind::kudos;
    f.target_turn_index = turn;
    f.rationale = std::move(rationale);
    return f;
}

}  // namespace

TEST(Service, CreateSessionStartsAtVersionOneWithPrinciples) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario(), fx::lonely_principles());
    auto s = h.service.get_session(id);
    EXPECT_EQ(s->constitution.version, 1);
    EXPECT_EQ(s->constitution.principles.size(), 4u);
    EXPECT_EQ(s->active_variant, PipelineVariant::full);
    auto empty = h.service.create_session(fx::lonely_scenario(), {}, PipelineVariant::naive);
    EXPECT_EQ(h.service.get_session(empty)->constitution.version, 0);
    EXPECT_EQ(h.service.get_session(empty)->active_variant, PipelineVariant::naive);
    auto bad = fx::lonely_scenario();
    bad.scenario_text = " ";
    EXPECT_THROW(h.service.create_session(bad), ValidationError);
    EXPECT_THROW(h.service.get_session("unknown"), NotFoundError);
}

TEST(Service, PostRecordsBothTurnsWithVersionAndTrace) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario(), fx::lonely_principles());
    auto turn = h.service.post_counselor_message(id, "Hi, how was work?");
    EXPECT_EQ(turn.role, Role::patient);
    EXPECT_EQ(turn.turn_index, 1);
    EXPECT_EQ(turn.text, fx::kCooperativeRefined);
    EXPECT_EQ(turn.constitution_version, 1);
    auto s = h.service.get_session(id);
    ASSERT_EQ(s->transcript.size(), 2u);
    ASSERT_TRUE(turn.trace_id.has_value());
    EXPECT_EQ(s->traces.at(*turn.trace_id).calls.size(), 3u);
    EXPECT_EQ(h.service.events(id).size(), 3u);
    EXPECT_THROW(h.service.post_counselor_message(id, "  "), ValidationError);
}

TEST(Service, FailedGenerationLeavesSessionUntouched) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario());
    h.fail_base = true;
    EXPECT_THROW(h.service.post_counselor_message(id, "Hello"), simulator::GenerationFailed);
    EXPECT_EQ(h.service.events(id).size(), 1u);
    EXPECT_TRUE(h.service.get_session(id)->transcript.empty());
    h.fail_base = false;
    EXPECT_NO_THROW(h.service.post_counselor_message(id, "Hello"));
}

TEST(Service, ClosedSessionRejectsMessages) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario());
    h.service.close(id);
    h.service.close(id);
    EXPECT_EQ(h.service.events(id).size(), 2u);
    EXPECT_THROW(h.service.post_counselor_message(id, "Hello"), ConflictError);
    EXPECT_THROW(h.service.rewind_and_regenerate(id), ConflictError);
}

TEST(Service, FeedbackValidation) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario());
    h.service.post_counselor_message(id, "Hello");
    EXPECT_THROW(h.service.submit_feedback(id, kudos(0)), ValidationError);
    EXPECT_THROW(h.service.submit_feedback(id, kudos(7)), ValidationError);
    EXPECT_THROW(h.service.submit_feedback(id, kudos(1, "")), ValidationError);
    FeedbackItem same;
    same.kind = FeedbackKind::rewrite;
    same.target_turn_index = 1;
    same.rewrite_text = fx::kCooperativeRefined;
    EXPECT_THROW(h.service.submit_feedback(id, same), ValidationError);
    auto fid = h.service.submit_feedback(id, kudos(1));
    const auto* stored = h.service.get_session(id)->find_feedback(fid);
    ASSERT_NE(stored, nullptr);
    EXPECT_EQ(stored->target_text, fx::kCooperativeRefined);
}

TEST(Service, ConvertIsIdempotentAndBumpsVersionOnce) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario(), {"Be brief"});
    h.service.post_counselor_message(id, "You are clearly a thoughtful person.");
    auto fid = h.service.submit_feedback(id, kudos(1));
    auto first = h.service.convert_feedback(id, fid);
    EXPECT_TRUE(first.created);
    EXPECT_EQ(first.principle.text, fx::kHesitancyPrinciple);
    EXPECT_EQ(first.principle.origin, PrincipleOrigin::kudos);
    EXPECT_EQ(first.principle.source_feedback_id, fid);
    auto events_after_first = h.service.events(id).size();
    auto second = h.service.convert_feedback(id, fid);
    EXPECT_FALSE(second.created);
    EXPECT_EQ(second.principle, first.principle);
    EXPECT_EQ(second.elicitation, first.elicitation);
    EXPECT_EQ(h.service.events(id).size(), events_after_first);
    EXPECT_EQ(h.service.get_session(id)->constitution.version, 2);

    h.service.delete_principle(id, first.principle.id);
    auto third = h.service.convert_feedback(id, fid);
    EXPECT_FALSE(third.created);
    EXPECT_EQ(third.principle.id, first.principle.id);
    EXPECT_EQ(h.service.get_session(id)->constitution.version, 3);
    EXPECT_THROW(h.service.convert_feedback(id, "nope"), NotFoundError);
}

TEST(Service, ElicitationWindowEndsBeforeTarget) {
    MemoryEventStore store;
    Harness h(store);
    std::string script;
    fx::CallbackProvider spy([&](const llm::CompletionRequest& r) {
        if (r.template_name == llm::kElicitKudos) script = r.bindings.at("conversation_script");
        return fx::cooperative_reply(r);
    });
    fx::Stack stack(spy);
    SessionService service(store, stack.simulator, stack.elicitor, stack.ids, stack.clock);
    auto id = service.create_session(fx::lonely_scenario());
    service.post_counselor_message(id, "first message");
    service.post_counselor_message(id, "second message");
    auto fid = service.submit_feedback(id, kudos(1));
    service.convert_feedback(id, fid);
    EXPECT_EQ(script, "Helper: first message");
}

TEST(Service, FailedConversionRecordsNothing) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario());
    h.service.post_counselor_message(id, "Hello");
    auto fid = h.service.submit_feedback(id, kudos(1));
    auto before = h.service.events(id).size();
    h.fail_elicitation = true;
    EXPECT_THROW(h.service.convert_feedback(id, fid), elicitation::ElicitationFailed);
    EXPECT_EQ(h.service.events(id).size(), before);
    EXPECT_FALSE(h.service.get_session(id)->find_feedback(fid)->converted_principle_id.has_value());
}

TEST(Service, RewindRegeneratesUnderCurrentVersion) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario(), {"Be brief"});
    EXPECT_THROW(h.service.rewind_and_regenerate(id), ConflictError);
    h.service.post_counselor_message(id, "Hello");
    auto fid = h.service.submit_feedback(id, kudos(1));
    h.service.convert_feedback(id, fid);
    auto turn = h.service.rewind_and_regenerate(id);
    EXPECT_EQ(turn.turn_index, 1);
    EXPECT_EQ(turn.constitution_version, 2);
    auto s = h.service.get_session(id);
    EXPECT_EQ(s->transcript.size(), 2u);
    EXPECT_EQ(s->transcript.back(), turn);
    auto log = h.service.events(id);
    EXPECT_EQ(log[log.size() - 2].kind, EventKind::rewound);
    EXPECT_EQ(log.back().kind, EventKind::patient_msg);
    auto history = patient_turn_history(log);
    ASSERT_EQ(history.size(), 2u);
    EXPECT_EQ(history[0].constitution_version, 1);
    // Feedback still refers to the text it was written against.
    EXPECT_EQ(s->find_feedback(fid)->target_text, fx::kCooperativeRefined);
}

TEST(Service, PrincipleEditsBumpVersion) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario());
    auto p = h.service.add_principle(id, "  Speak briefly ");
    EXPECT_EQ(p.text, "Speak briefly");
    auto edited = h.service.edit_principle(id, p.id, "Speak very briefly");
    EXPECT_TRUE(edited.edited);
    EXPECT_EQ(edited.text, "Speak very briefly");
    EXPECT_EQ(h.service.get_session(id)->constitution.version, 2);
    h.service.delete_principle(id, p.id);
    EXPECT_EQ(h.service.get_session(id)->constitution.version, 3);
    EXPECT_TRUE(h.service.get_session(id)->constitution.principles.empty());
    EXPECT_THROW(h.service.edit_principle(id, p.id, "x"), NotFoundError);
    EXPECT_THROW(h.service.delete_principle(id, p.id), NotFoundError);
    EXPECT_THROW(h.service.add_principle(id, " "), ValidationError);
}

TEST(Service, PreviewStoresNothing) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario());
    auto reply = h.service.preview(id, "Hello");
    EXPECT_EQ(reply.text, fx::kCooperativeRefined);
    EXPECT_EQ(h.service.events(id).size(), 1u);
}

TEST(Service, ExportShape) {
    MemoryEventStore store;
    Harness h(store);
    auto id = h.service.create_session(fx::lonely_scenario(), {"Be brief"});
    h.service.post_counselor_message(id, "Hello");
    auto out = h.service.export_transcript(id);
    EXPECT_EQ(out["session_id"], id);
    EXPECT_EQ(out["principles"], json::array({"Be brief"}));
    EXPECT_EQ(out["constitution_version"], 1);
    EXPECT_EQ(out["transcript"].size(), 2u);
    EXPECT_EQ(out["scenario_text"], fx::lonely_scenario().scenario_text);
}

TEST(Service, ReloadFromJsonlMatchesLiveSnapshot) {
    auto dir = std::filesystem::temp_directory_path() / ("patientsim_service_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::string id;
    Session live;
    {
        JsonlEventStore store(dir);
        Harness h(store);
        id = h.service.create_session(fx::lonely_scenario(), {"Be brief"});
        h.service.post_counselor_message(id, "Hello");
        auto fid = h.service.submit_feedback(id, kudos(1));
        h.service.convert_feedback(id, fid);
        h.service.rewind_and_regenerate(id);
        live = *h.service.get_session(id);
    }
    JsonlEventStore store(dir);
    Harness h(store);
    EXPECT_EQ(h.service.load_all(), 1u);
    EXPECT_EQ(*h.service.get_session(id), live);
    EXPECT_EQ(h.service.list_sessions(), std::vector<std::string>{id});
    h.service.post_counselor_message(id, "Still there?");
    EXPECT_EQ(replay(store.load(id)), *h.service.get_session(id));
    std::filesystem::remove_all(dir);
}

TEST(Service, ParallelSessionsStayConsistent) {
    MemoryEventStore store;
    Harness h(store, PipelineVariant::no_critique);
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(h.service.create_session(fx::lonely_scenario()));
    std::atomic<int> conflicts{0};
    {
        std::vector<std::jthread> workers;
        for (int w = 0; w < 8; ++w) {
            workers.emplace_back([&, w] {
                for (int k = 0; k < 10; ++k) {
                    try {
                        h.service.post_counselor_message(ids[w % 4], "message " + std::to_string(k));
                    } catch (const ConflictError&) {
                        ++conflicts;
                    }
                }
            });
        }
    }
    EXPECT_EQ(conflicts.load(), 0);
    for (const auto& id : ids) {
        auto s = h.service.get_session(id);
        EXPECT_EQ(s->transcript.size(), 40u);
        EXPECT_EQ(replay(store.load(id)), *s);
    }
}
