/*
 * Copyright (C) 2026 The tlretrieve Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "tlr/clients/answerer.hpp"
#include "tlr/clients/cache.hpp"
#include "tlr/clients/chat.hpp"
#include "tlr/clients/detector.hpp"
#include "tlr/clients/prompts.hpp"
#include "tlr/clients/translator.hpp"
#include "tlr/digest.hpp"
#include "tlr/error.hpp"
#include "tlr/log.hpp"

namespace tlr::clients {
namespace {

ChatReply logprob_reply(std::string token, std::vector<std::pair<std::string, double>> top) {
    const double lp = top.empty() ? 0.0 : top.front().second;
    return ChatReply{token, {TokenLogprob{token, lp, std::move(top)}}};
}

struct QuietLog {
    LogSink prev = set_log_sink([](LogLevel, std::string_view) {});
    ~QuietLog() { set_log_sink(prev); }
};

std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("tlr_clients_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

// ---- yes/no probability -----------------------------------------------------

TEST(YesProbability, TwoWaySoftmax) {
    EXPECT_DOUBLE_EQ(yes_probability(logprob_reply("Yes", {{"Yes", -0.7}, {"No", -0.7}})), 0.5);
    EXPECT_NEAR(yes_probability(logprob_reply("Yes", {{"Yes", 0.0}, {"No", -2.0}})), 1.0 / (1.0 + std::exp(-2.0)),
                1e-15);
    EXPECT_NEAR(yes_probability(logprob_reply("Yes", {{"Yes", 0.0}, {"No", -2.0}})), 0.8808, 1e-4);
}

TEST(YesProbability, SumsSpellingVariants) {
    const auto r = logprob_reply("Yes", {{"Yes", std::log(0.4)}, {" yes", std::log(0.2)}, {"NO", std::log(0.2)},
                                         {"maybe", std::log(0.2)}});
    EXPECT_NEAR(yes_probability(r), 0.75, 1e-12);
}

TEST(YesProbability, OneSidedAndTextFallback) {
    EXPECT_NEAR(yes_probability(logprob_reply("No", {{"No", std::log(0.9)}, {"Hmm", std::log(0.1)}})), 0.1, 1e-12);
    EXPECT_EQ(yes_probability(ChatReply{"Yes.", {}}), kYesWithoutLogprobs);
    EXPECT_EQ(yes_probability(ChatReply{" no", {}}), kNoWithoutLogprobs);
    EXPECT_THROW(yes_probability(ChatReply{"Perhaps", {}}), ReplyError);
}

// ---- detectors ----------------------------------------------------------------

TEST(FixtureDetector, ServesMatrix) {
    const PropositionSet props{"a", "b"};
    FixtureDetector d(DetectionMatrix({{0.7, 0.1}, {0.2, 0.9}}, {}), props);
    EXPECT_EQ(d.detect(props[0], WindowRef{0, 0, 2, {}}), 0.7);
    EXPECT_EQ(detect_window(d, props, WindowRef{1, 3, 5, {}}, 4), (std::vector<double>{0.2, 0.9}));
    EXPECT_THROW(FixtureDetector(DetectionMatrix({{0.5}}, {}), props), InvalidInput);
}

TEST(RemoteDetector, RequestShapeAndScore) {
    const auto dir = scratch("frames");
    for (int i = 0; i < 3; ++i) std::ofstream(dir / ("f" + std::to_string(i) + ".jpg")) << "img" << i;
    ScriptedTransport t({logprob_reply("Yes", {{"Yes", 0.0}, {"No", -2.0}})});
    RemoteDetector d(t, "vlm");
    const PropositionSet props{"dog runs"};
    WindowRef w{0, 0, 2, {dir / "f0.jpg", dir / "f1.jpg", dir / "f2.jpg"}};
    EXPECT_NEAR(d.detect(props[0], w), 0.8808, 1e-4);
    const auto req = t.requests().at(0);
    EXPECT_EQ(req.model, "vlm");
    EXPECT_TRUE(req.logprobs);
    EXPECT_EQ(req.max_tokens, 1);
    ASSERT_EQ(req.messages.size(), 1u);
    EXPECT_EQ(req.messages[0].text, "Is \"dog runs\" visible in these frames? Answer Yes or No.");
    EXPECT_EQ(req.messages[0].images.size(), 3u);
    const auto wire = to_wire(req);
    EXPECT_EQ(wire["messages"][0]["content"][1]["image_url"]["url"], "data:image/jpeg;base64," + base64_encode("img0"));
    EXPECT_EQ(wire["logprobs"], true);
    EXPECT_THROW(d.detect(props[0], WindowRef{0, 0, 2, {}}), InvalidInput);
    std::filesystem::remove_all(dir);
}

TEST(DetectWindow, ConcurrentResultsOrderedById) {
    struct Slow final : Detector {
        std::atomic<int> live{0}, peak{0};
        double detect(const Proposition& p, const WindowRef&) override {
            const int now = ++live;
            int prev = peak.load();
            while (now > prev && !peak.compare_exchange_weak(prev, now)) {}
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            --live;
            return p.id / 10.0;
        }
    } slow;
    std::vector<std::string> names;
    for (int i = 0; i < 8; ++i) names.push_back("p" + std::to_string(i) + " event");
    const PropositionSet props(names);
    const auto row = detect_window(slow, props, WindowRef{}, 3);
    for (std::size_t i = 0; i < row.size(); ++i) EXPECT_DOUBLE_EQ(row[i], i / 10.0);
    EXPECT_LE(slow.peak.load(), 3);
    EXPECT_GE(slow.peak.load(), 2);
}

TEST(DetectWindow, RejectsOutOfRangeScores) {
    struct Bad final : Detector {
        double detect(const Proposition&, const WindowRef&) override { return 1.5; }
    } bad;
    EXPECT_THROW(detect_window(bad, PropositionSet{"a"}, WindowRef{}), ReplyError);
}

// ---- translator ---------------------------------------------------------------

const char* kGoodReply = "PROPOSITIONS:\n- man opens door\n- man sits down\nFORMULA: \"man opens door\" & F \"man sits down\"\n";

TEST(Translator, ParsesConstrainedFormat) {
    const auto t = parse_translation_reply(kGoodReply);
    EXPECT_EQ(t.propositions.texts(), (std::vector<std::string>{"man opens door", "man sits down"}));
    EXPECT_EQ(t.formula, Formula::conjunction(Formula::atom(0), Formula::eventually(Formula::atom(1))));
    const auto fenced = parse_translation_reply("```\nPROPOSITIONS:\n1. a b\n2) c d\nFORMULA:\np0 U\np1\n```");
    EXPECT_EQ(fenced.formula, Formula::until(Formula::atom(0), Formula::atom(1)));
    EXPECT_THROW(parse_translation_reply("FORMULA: p0"), ReplyError);
    EXPECT_THROW(parse_translation_reply("PROPOSITIONS:\n- a\n"), ReplyError);
    EXPECT_THROW(parse_translation_reply("PROPOSITIONS:\n- a\nFORMULA: p0 W p0"), ParseError);
}

TEST(Translator, TwoShotRequest) {
    ScriptedTransport t({ChatReply{kGoodReply, {}}});
    LlmTranslator tr(t, "llm");
    const auto out = tr.translate("Where does the man sit after opening the door?");
    EXPECT_EQ(out.propositions.size(), 2u);
    const auto req = t.requests().at(0);
    ASSERT_EQ(req.messages.size(), 6u);
    EXPECT_EQ(req.messages[0].role, Role::System);
    EXPECT_EQ(req.messages[2].role, Role::Assistant);
    EXPECT_EQ(req.messages[5].text, "Where does the man sit after opening the door?");
    // The shipped shots must themselves be valid replies.
    EXPECT_NO_THROW(parse_translation_reply(prompt("q2tl_shot1_reply")));
    EXPECT_NO_THROW(parse_translation_reply(prompt("q2tl_shot2_reply")));
}

TEST(Translator, OneRepromptThenHardError) {
    QuietLog quiet;
    ScriptedTransport recover({ChatReply{"FORMULA: p0 ?? p1", {}}, ChatReply{kGoodReply, {}}});
    LlmTranslator a(recover, "llm");
    EXPECT_EQ(a.translate("q?").propositions.size(), 2u);
    EXPECT_EQ(recover.calls(), 2u);
    const auto second = recover.requests().at(1);
    EXPECT_EQ(second.messages.size(), 8u);
    EXPECT_NE(second.messages.back().text.find("could not be used"), std::string::npos);

    ScriptedTransport never({ChatReply{"PROPOSITIONS:\n- a\nFORMULA: p0 W p0", {}}});
    LlmTranslator b(never, "llm");
    EXPECT_THROW(b.translate("q?"), ReplyError);
    EXPECT_EQ(never.calls(), 2u);
    EXPECT_THROW(b.translate("   "), InvalidInput);
}

TEST(Translator, TransportErrorsAreNotReprompted) {
    ScriptedTransport down([](const ChatRequest&) -> ChatReply { throw TransportError("down"); });
    LlmTranslator tr(down, "llm");
    EXPECT_THROW(tr.translate("q?"), TransportError);
    EXPECT_EQ(down.calls(), 1u);
}

// ---- answerer -----------------------------------------------------------------

TEST(Answerer, TolerantLetterExtraction) {
    EXPECT_EQ(extract_choice("B", 4), std::size_t{1});
    EXPECT_EQ(extract_choice("The answer is (C).", 4), std::size_t{2});
    EXPECT_EQ(extract_choice("answer is d", 4), std::size_t{3});
    EXPECT_EQ(extract_choice("[A] because", 4), std::size_t{0});
    EXPECT_FALSE(extract_choice("E", 4).has_value());
    EXPECT_FALSE(extract_choice("no idea", 4).has_value());
}

TEST(Answerer, RequestAndMatch) {
    ScriptedTransport t({ChatReply{"B", {}}});
    const auto r = answer(t, "vqa", "What is grabbed?", {"cup", "phone", "keys"}, {});
    EXPECT_EQ(r.choice, std::size_t{1});
    EXPECT_TRUE(matches(r.choice, 1));
    EXPECT_FALSE(matches(std::nullopt, 1));
    const auto text = t.requests().at(0).messages.at(0).text;
    EXPECT_NE(text.find("A. cup\nB. phone\nC. keys"), std::string::npos);
    EXPECT_THROW(build_answer_request("m", "q", {"only"}, {}), InvalidInput);
    ScriptedTransport unclear({ChatReply{"hmm", {}}});
    EXPECT_FALSE(answer(unclear, "vqa", "q", {"x", "y"}, {}).choice.has_value());
}

// ---- wire format --------------------------------------------------------------

TEST(Wire, RequestShape) {
    ChatRequest req{"m", {{Role::System, "sys", {}}, {Role::User, "hi", {}}}, false, 0, 0.0, 0};
    const auto j = to_wire(req);
    EXPECT_EQ(j["model"], "m");
    EXPECT_EQ(j["messages"][0]["role"], "system");
    EXPECT_EQ(j["messages"][1]["content"], "hi");
    EXPECT_FALSE(j.contains("logprobs"));
    EXPECT_FALSE(j.contains("max_tokens"));
}

TEST(Wire, ReplyParsing) {
    const auto body = nlohmann::json::parse(R"({"choices":[{"message":{"role":"assistant","content":"Yes"},
        "logprobs":{"content":[{"token":"Yes","logprob":-0.1,"top_logprobs":[{"token":"Yes","logprob":-0.1},
        {"token":"No","logprob":-2.4}]}]}}]})");
    const auto r = reply_from_wire(body);
    EXPECT_EQ(r.text, "Yes");
    ASSERT_EQ(r.tokens.size(), 1u);
    EXPECT_EQ(r.tokens[0].top.size(), 2u);
    EXPECT_EQ(reply_from_json(to_json(r)), r);
    EXPECT_THROW(reply_from_wire(nlohmann::json::parse(R"({"choices":[{"message":{"content":""}}]})")), ReplyError);
    EXPECT_THROW(reply_from_wire(nlohmann::json::parse(R"({"error":"x"})")), ReplyError);
    EXPECT_THROW(role_from_string("tool"), ReplyError);
}

// ---- HTTP transport against a local server ------------------------------------

struct MockServer {
    httplib::Server server;
    int port = 0;
    std::thread thread;
    std::atomic<int> hits{0};
    std::atomic<int> fail_first{0};
    std::atomic<int> status{200};
    std::string last_body;
    std::string last_auth;
    std::mutex mutex;

    MockServer() {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const int n = ++hits;
            {
                std::lock_guard lock(mutex);
                last_body = req.body;
                last_auth = req.get_header_value("Authorization");
            }
            if (n <= fail_first) {
                res.status = 503;
                return;
            }
            res.status = status;
            res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"No"}}]})", "application/json");
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~MockServer() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1"; }
};

TEST(HttpTransport, PostsOpenAiBody) {
    MockServer mock;
    HttpChatTransport http(Endpoint{mock.url(), "secret", std::chrono::seconds(5)});
    ChatRequest req{"m", {{Role::User, "Is it raining?", {}}}, true, 5, 0.0, 1};
    const auto reply = http.complete(req);
    EXPECT_EQ(reply.text, "No");
    EXPECT_EQ(yes_probability(reply), kNoWithoutLogprobs);
    const auto body = nlohmann::json::parse(mock.last_body);
    EXPECT_EQ(body, to_wire(req));
    EXPECT_EQ(mock.last_auth, "Bearer secret");
    EXPECT_EQ(http.attempts(), 1u);
}

TEST(HttpTransport, RetriesServerErrorsWithBackoff) {
    MockServer mock;
    mock.fail_first = 2;
    HttpChatTransport http(Endpoint{mock.url(), "", std::chrono::seconds(5)},
                           RetryPolicy{3, std::chrono::milliseconds(1)});
    EXPECT_EQ(http.complete(ChatRequest{"m", {{Role::User, "x", {}}}}).text, "No");
    EXPECT_EQ(http.attempts(), 3u);
    mock.fail_first = 100;
    EXPECT_THROW(http.complete(ChatRequest{"m", {{Role::User, "x", {}}}}), TransportError);
    EXPECT_EQ(http.attempts(), 6u);
}

TEST(HttpTransport, ClientErrorsAreNotRetried) {
    MockServer mock;
    mock.status = 401;
    HttpChatTransport http(Endpoint{mock.url(), "", std::chrono::seconds(5)},
                           RetryPolicy{3, std::chrono::milliseconds(1)});
    EXPECT_THROW(http.complete(ChatRequest{"m", {{Role::User, "x", {}}}}), TransportError);
    EXPECT_EQ(http.attempts(), 1u);
}

TEST(HttpTransport, UnreachableEndpoint) {
    HttpChatTransport http(Endpoint{"http://127.0.0.1:1/v1", "", std::chrono::seconds(1)},
                           RetryPolicy{2, std::chrono::milliseconds(1)});
    EXPECT_THROW(http.complete(ChatRequest{"m", {{Role::User, "x", {}}}}), TransportError);
    EXPECT_EQ(http.attempts(), 2u);
}

TEST(Endpoint, FromEnvironment) {
    ::setenv("TLR_ENDPOINT", "http://example.invalid/v1", 1);
    ::setenv("TLR_API_KEY", "k", 1);
    const auto ep = endpoint_from_env();
    EXPECT_EQ(ep.base_url, "http://example.invalid/v1");
    EXPECT_EQ(ep.api_key, "k");
    ::unsetenv("TLR_ENDPOINT");
    ::unsetenv("TLR_API_KEY");
    EXPECT_THROW(endpoint_from_env(), InvalidInput);
}

// ---- cache --------------------------------------------------------------------

TEST(Cache, SecondCallIsServedLocally) {
    const auto dir = scratch("cache_hit");
    ScriptedTransport inner({ChatReply{"Yes", {TokenLogprob{"Yes", -0.2, {{"Yes", -0.2}, {"No", -1.8}}}}}});
    CachedTransport cache(inner, dir);
    const ChatRequest req{"m", {{Role::User, "Is \"cat\" visible?", {}}}, true, 5, 0.0, 1};
    const auto a = cache.complete(req);
    const auto b = cache.complete(req);
    EXPECT_EQ(a, b);
    EXPECT_EQ(inner.calls(), 1u);
    EXPECT_EQ(cache.hits(), 1u);
    EXPECT_EQ(cache.misses(), 1u);
    EXPECT_TRUE(std::filesystem::exists(cache.entry_path(request_digest(req))));
    // A fresh instance reads the stored entry.
    CachedTransport again(inner, dir);
    EXPECT_EQ(again.complete(req), a);
    EXPECT_EQ(inner.calls(), 1u);
    std::filesystem::remove_all(dir);
}

TEST(Cache, DisabledAlwaysCalls) {
    const auto dir = scratch("cache_off");
    ScriptedTransport inner({ChatReply{"No", {}}});
    CachedTransport cache(inner, dir, false);
    const ChatRequest req{"m", {{Role::User, "x", {}}}};
    cache.complete(req);
    cache.complete(req);
    EXPECT_EQ(inner.calls(), 2u);
    std::filesystem::remove_all(dir);
}

TEST(Cache, WhitespaceInsensitiveKeys) {
    const ChatRequest a{"m", {{Role::User, "Is  \"cat\"\n visible? ", {}}}};
    const ChatRequest b{"m", {{Role::User, "Is \"cat\" visible?", {}}}};
    const ChatRequest c{"m", {{Role::User, "Is \"dog\" visible?", {}}}};
    EXPECT_EQ(request_digest(a), request_digest(b));
    EXPECT_NE(request_digest(a), request_digest(c));
    ChatRequest d = b;
    d.model = "other";
    EXPECT_NE(request_digest(d), request_digest(b));
}

TEST(Cache, ImageContentIsPartOfTheKey) {
    const auto dir = scratch("cache_img");
    std::ofstream(dir / "a.png") << "one";
    std::ofstream(dir / "b.png") << "one";
    std::ofstream(dir / "c.png") << "two";
    const ChatRequest a{"m", {{Role::User, "x", {dir / "a.png"}}}};
    const ChatRequest b{"m", {{Role::User, "x", {dir / "b.png"}}}};
    const ChatRequest c{"m", {{Role::User, "x", {dir / "c.png"}}}};
    EXPECT_EQ(request_digest(a), request_digest(b));
    EXPECT_NE(request_digest(a), request_digest(c));
    std::filesystem::remove_all(dir);
}

TEST(Cache, CorruptEntryIsAMissWithWarning) {
    const auto dir = scratch("cache_corrupt");
    std::vector<std::string> warnings;
    const auto prev = set_log_sink([&](LogLevel l, std::string_view m) {
        if (l == LogLevel::Warn) warnings.emplace_back(m);
    });
    ScriptedTransport inner({ChatReply{"Yes", {}}});
    CachedTransport cache(inner, dir);
    const ChatRequest req{"m", {{Role::User, "x", {}}}};
    const auto path = cache.entry_path(request_digest(req));
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path) << "{not json";
    EXPECT_EQ(cache.complete(req).text, "Yes");
    set_log_sink(prev);
    EXPECT_EQ(inner.calls(), 1u);
    EXPECT_EQ(warnings.size(), 1u);
    // The bad entry was replaced.
    EXPECT_EQ(cache.complete(req).text, "Yes");
    EXPECT_EQ(inner.calls(), 1u);
    std::filesystem::remove_all(dir);
}

TEST(Cache, ConcurrentReaders) {
    const auto dir = scratch("cache_threads");
    ScriptedTransport inner([](const ChatRequest& r) { return ChatReply{"echo " + r.messages[0].text, {}}; });
    CachedTransport cache(inner, dir);
    std::vector<std::thread> threads;
    std::atomic<int> bad{0};
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) {
                const std::string text = "q" + std::to_string((i + t) % 10);
                if (cache.complete(ChatRequest{"m", {{Role::User, text, {}}}}).text != "echo " + text) ++bad;
            }
        });
    }
    for (auto& th : threads) th.join();
    EXPECT_EQ(bad.load(), 0);
    EXPECT_LE(inner.calls(), 80u);
    EXPECT_GE(inner.calls(), 10u);
    std::filesystem::remove_all(dir);
}

// ---- prompts ------------------------------------------------------------------

TEST(Prompts, VersionedAndPinned) {
    EXPECT_EQ(prompt_version(), "v1");
    const std::vector<std::pair<std::string, std::string>> pinned = {
        // sha256 of each v1 prompt body; editing a prompt means bumping the version.
        {"answer", "a651c2e813bc436ee250c2f7a491ea6a8d2f36ccf357c9c8b88478cc3c299f3f"},
        {"detect", "0b86218c10a997c7745160912111a2568c16289f29ef5aabdf6702a686fb4c3a"},
        {"extension", "e114abea5eb47edc4549ebb2241e9c3b9c5128c335a14f1fecbe45f9049d1880"},
        {"q2tl_reprompt", "8202e7dbfeb2f733d837e6304b884b862fea19ed05487bd6a373faecff8e7d7e"},
        {"q2tl_shot1_question", "b8f91d75178378c2198a9c6e0c76ed0f1bcdd9bfef0651458d74f9d63a3f8fe5"},
        {"q2tl_shot1_reply", "8c1beeeca73cd563201efae358da355025dbc99a8ca9bd42bff3eb6b44cc803d"},
        {"q2tl_shot2_question", "81a4607ce0e0baf2d18b4cb7df035cbe03c679342c090d0c9c01f2044cb69b29"},
        {"q2tl_shot2_reply", "f530e9dfc333cd85bc38618a6c3c2fec6c81d51bd1be7895a7ef3eeec4b6b99b"},
        {"q2tl_system", "3c617936f3a8dacbc1c6c3be64160221c42610da56f0e58b187acdc2ea1574fc"},
    };
    EXPECT_EQ(prompt_names().size(), 9u);
    for (const auto& [name, digest] : pinned) EXPECT_EQ(sha256_hex(prompt(name)), digest) << name;
    EXPECT_THROW(prompt("missing"), InvalidInput);
    EXPECT_EQ(fill("a {x} b {x} {y}", {{"x", "1"}}), "a 1 b 1 {y}");
}

} // namespace
} // namespace tlr::clients
