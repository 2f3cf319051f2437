#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include <nlohmann/json.hpp>

#include "patientsim/error.hpp"
#include "patientsim/llm/http_provider.hpp"

using namespace patientsim;
using namespace patientsim::llm;

namespace {

// Local stand-in for a chat-completions endpoint.
class FakeUpstream {
public:
    FakeUpstream() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            last_body = nlohmann::json::parse(req.body);
            last_auth = req.get_header_value("Authorization");
            res.status = status;
            res.set_content(reply, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeUpstream() {
        server_.stop();
        thread_.join();
    }

    std::string base() const { return "http://127.0.0.1:" + std::to_string(port_); }

    int status = 200;
    std::string reply = R"({"choices": [{"message": {"role": "assistant", "content": "hello"}}]})";
    nlohmann::json last_body;
    std::string last_auth;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

CompletionRequest request(bool json_mode) {
    return {"t", {}, "PROMPT", {"gpt-4-turbo-1106", 0.7, json_mode, 256}};
}

}  // namespace

TEST(HttpProvider, EndpointPathHandlesV1Prefix) {
    EXPECT_EQ(HttpProvider("https://api.openai.com", "", std::chrono::seconds{1}).endpoint_path(),
              "/v1/chat/completions");
    EXPECT_EQ(HttpProvider("http://h:1/v1/", "", std::chrono::seconds{1}).endpoint_path(), "/v1/chat/completions");
    EXPECT_EQ(HttpProvider("http://h:1/proxy", "", std::chrono::seconds{1}).endpoint_path(),
              "/proxy/v1/chat/completions");
    EXPECT_THROW(HttpProvider("localhost", "", std::chrono::seconds{1}), Error);
}

TEST(HttpProvider, SendsPromptAsSingleUserMessage) {
    FakeUpstream up;
    HttpProvider p(up.base(), "sk-1", std::chrono::seconds{5});
    EXPECT_EQ(p.complete(request(true)), "hello");
    EXPECT_EQ(up.last_auth, "Bearer sk-1");
    EXPECT_EQ(up.last_body["model"], "gpt-4-turbo-1106");
    EXPECT_DOUBLE_EQ(up.last_body["temperature"].get<double>(), 0.7);
    ASSERT_EQ(up.last_body["messages"].size(), 1u);
    EXPECT_EQ(up.last_body["messages"][0]["role"], "user");
    EXPECT_EQ(up.last_body["messages"][0]["content"], "PROMPT");
    EXPECT_EQ(up.last_body["response_format"]["type"], "json_object");

    p.complete(request(false));
    EXPECT_FALSE(up.last_body.contains("response_format"));
}

TEST(HttpProvider, UpstreamErrorsBecomeProviderErrors) {
    FakeUpstream up;
    HttpProvider p(up.base(), "", std::chrono::seconds{5});
    up.status = 429;
    up.reply = R"({"error": {"message": "slow down"}})";
    try {
        p.complete(request(false));
        FAIL();
    } catch (const ProviderError& e) {
        EXPECT_EQ(e.kind(), ProviderError::Kind::provider);
        EXPECT_NE(std::string(e.what()).find("slow down"), std::string::npos);
    }
    up.status = 200;
    up.reply = R"({"choices": []})";
    EXPECT_THROW(p.complete(request(false)), ProviderError);
}

TEST(HttpProvider, UnreachableHostIsATransportError) {
    int port = 0;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    HttpProvider p("http://127.0.0.1:" + std::to_string(port), "", std::chrono::seconds{1});
    try {
        p.complete(request(false));
        FAIL();
    } catch (const ProviderError& e) {
        EXPECT_NE(e.kind(), ProviderError::Kind::provider);
    }
}
