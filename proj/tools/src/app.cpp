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

#include "tlr/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "tlr/calibration.hpp"
#include "tlr/clients/answerer.hpp"
#include "tlr/clients/cache.hpp"
#include "tlr/clients/chat.hpp"
#include "tlr/clients/detector.hpp"
#include "tlr/clients/translator.hpp"
#include "tlr/digest.hpp"
#include "tlr/error.hpp"
#include "tlr/io.hpp"
#include "tlr/log.hpp"
#include "tlr/parse.hpp"
#include "tlr/report.hpp"

namespace tlr::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
    if (auto d = parse_double(v)) return *d;
    throw InvalidInput("expected a number, found \"" + v + "\"");
}

std::size_t to_size(const std::string& v) {
    const double d = to_double(v);
    if (d < 0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
        throw InvalidInput("expected a non-negative integer, found \"" + v + "\"");
    }
    return static_cast<std::size_t>(d);
}

std::int64_t to_int(const std::string& v) {
    const double d = to_double(v);
    if (d != static_cast<double>(static_cast<std::int64_t>(d))) throw InvalidInput("expected an integer, found \"" + v + "\"");
    return static_cast<std::int64_t>(d);
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw InvalidInput("expected true or false, found \"" + v + "\"");
}

using Setter = std::function<void(PipelineConfig&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"window_size", [](auto& c, auto& v) { c.retrieval.geometry.window_size = to_size(v); }},
        {"stride", [](auto& c, auto& v) { c.retrieval.geometry.stride = to_size(v); }},
        {"fps", [](auto& c, auto& v) { c.retrieval.geometry.fps = to_double(v); }},
        {"prune_epsilon", [](auto& c, auto& v) { c.retrieval.build.prune_epsilon = to_double(v); }},
        {"max_branches", [](auto& c, auto& v) { c.retrieval.build.max_branches = to_size(v); }},
        {"thresholds",
         [](auto& c, auto& v) {
             c.retrieval.build.label_thresholds.clear();
             std::stringstream ss(v);
             for (std::string item; std::getline(ss, item, ',');) {
                 c.retrieval.build.label_thresholds.push_back(to_double(trim(item)));
             }
         }},
        {"gamma", [](auto& c, auto& v) { c.retrieval.smoothing.gamma = to_double(v); }},
        {"tau", [](auto& c, auto& v) { c.retrieval.smoothing.tau = to_double(v); }},
        {"tau_stop", [](auto& c, auto& v) { c.retrieval.tau_stop = to_double(v); }},
        {"frame_budget", [](auto& c, auto& v) { c.retrieval.frame_budget = to_size(v); }},
        {"extension_alpha",
         [](auto& c, auto& v) {
             if (!c.retrieval.extension) c.retrieval.extension = ExtensionSpans{};
             c.retrieval.extension->alpha = to_int(v);
         }},
        {"extension_beta",
         [](auto& c, auto& v) {
             if (!c.retrieval.extension) c.retrieval.extension = ExtensionSpans{};
             c.retrieval.extension->beta = to_int(v);
         }},
        {"extension_source",
         [](auto& c, auto& v) {
             if (v != "keyword" && v != "llm") throw InvalidInput("extension_source must be keyword or llm");
             c.extension_source = v;
         }},
        {"anchor_anywhere", [](auto& c, auto& v) { c.retrieval.anchor_anywhere = to_bool(v); }},
        {"max_in_flight", [](auto& c, auto& v) { c.retrieval.max_in_flight = to_size(v); }},
        {"endpoint", [](auto& c, auto& v) { c.endpoint = v; }},
        {"translator_model", [](auto& c, auto& v) { c.translator_model = v; }},
        {"detector_model", [](auto& c, auto& v) { c.detector_model = v; }},
        {"answer_model", [](auto& c, auto& v) { c.answer_model = v; }},
        {"retry_attempts",
         [](auto& c, auto& v) {
             const auto n = to_size(v);
             if (n < 1 || n > 10) throw InvalidInput("retry_attempts must be in [1, 10]");
             c.retry_attempts = static_cast<int>(n);
         }},
        {"cache", [](auto& c, auto& v) { c.cache = to_bool(v); }},
        {"cache_dir", [](auto& c, auto& v) { c.cache_dir = v; }},
        {"trim_template", [](auto& c, auto& v) { c.trim_template = v; }},
    };
    return table;
}

} // namespace

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
}

void apply_config_text(PipelineConfig& cfg, std::string_view text, std::string_view origin) {
    std::size_t lineno = 0;
    std::stringstream ss{std::string(text)};
    for (std::string raw; std::getline(ss, raw);) {
        ++lineno;
        const auto where = std::string(origin) + ":" + std::to_string(lineno) + ": ";
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidInput(where + "expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& table = setters();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (it == table.end()) throw InvalidInput(where + "unknown key \"" + key + "\"");
        try {
            it->second(cfg, value);
        } catch (const InvalidInput& e) {
            throw InvalidInput(where + key + ": " + e.what());
        }
    }
    try {
        cfg.retrieval.check();
    } catch (const InvalidInput& e) {
        throw InvalidInput(std::string(origin) + ": " + e.what());
    }
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
    apply_config_text(cfg, read_file(path), path.string());
}

void apply_environment(PipelineConfig& cfg) {
    auto env = [](const char* name, std::string& dst) {
        if (const char* v = std::getenv(name); v && *v) dst = v;
    };
    env("TLR_ENDPOINT", cfg.endpoint);
    env("TLR_API_KEY", cfg.api_key);
    env("TLR_TRANSLATOR_MODEL", cfg.translator_model);
    env("TLR_DETECTOR_MODEL", cfg.detector_model);
    env("TLR_ANSWER_MODEL", cfg.answer_model);
}

namespace {

// Remote plumbing, created on first use so offline commands never need an endpoint.
struct Remote {
    std::unique_ptr<clients::HttpChatTransport> http;
    std::unique_ptr<clients::CachedTransport> cached;

    clients::ChatTransport& transport(const PipelineConfig& cfg) {
        if (!cached) {
            if (cfg.endpoint.empty()) {
                throw InvalidInput("no endpoint configured: set TLR_ENDPOINT or the endpoint config key");
            }
            clients::Endpoint ep{cfg.endpoint, cfg.api_key, std::chrono::seconds(120)};
            http = std::make_unique<clients::HttpChatTransport>(
                ep, clients::RetryPolicy{cfg.retry_attempts, std::chrono::milliseconds(500)},
                static_cast<std::ptrdiff_t>(cfg.retrieval.max_in_flight));
            cached = std::make_unique<clients::CachedTransport>(*http, cfg.cache_dir, cfg.cache);
        }
        return *cached;
    }
};

std::string require_model(const std::string& model, const char* what) {
    if (model.empty()) throw InvalidInput(std::string("no ") + what + " model configured");
    return model;
}

Formula load_formula(const std::filesystem::path& path, const PropositionSet& props) {
    return parse_tl(trim(read_file(path)), props);
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        auto ext = e.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".webp") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw InvalidInput("no frame images in " + dir.string());
    return out;
}

struct Options {
    std::string config;
    std::string fixture;
    std::string formula;
    std::string question;
    std::string pairs;
    std::string positives;
    std::string frames;
    std::string reply;
    std::vector<std::string> choices;
    bool emit_trim = false;
    bool no_cache = false;
    std::uint64_t seed = 0;
    bool verbose = false;
};

PipelineConfig load_config(const Options& o) {
    PipelineConfig cfg;
    if (!o.config.empty()) apply_config_file(cfg, o.config);
    apply_environment(cfg);
    if (o.no_cache) cfg.cache = false;
    return cfg;
}

int cmd_translate(const Options& o, std::ostream& out) {
    if (trim(o.question).empty()) throw InvalidInput("--question must not be empty");
    auto cfg = load_config(o);
    Remote remote;
    std::unique_ptr<clients::ScriptedTransport> scripted;
    clients::ChatTransport* transport;
    if (!o.reply.empty()) {
        // Canned reply file: offline and deterministic.
        scripted = std::make_unique<clients::ScriptedTransport>(
            std::vector<clients::ChatReply>{clients::ChatReply{read_file(o.reply), {}}});
        transport = scripted.get();
    } else {
        transport = &remote.transport(cfg);
    }
    clients::LlmTranslator translator(*transport, o.reply.empty() ? require_model(cfg.translator_model, "translator")
                                                                  : cfg.translator_model);
    const auto t = translator.translate(o.question);
    out << dump(translation_json(t));
    return kOk;
}

int cmd_check(const Options& o, std::ostream& out) {
    if (o.fixture.empty() || o.formula.empty()) throw InvalidInput("check needs --fixture and --formula");
    const auto cfg = load_config(o);
    const auto file = load_matrix(o.fixture);
    const auto f = load_formula(o.formula, file.propositions);
    const auto automaton = build_automaton(file.matrix, cfg.retrieval.build);
    const auto r = check(automaton, f, cfg.retrieval.smoothing);
    out << dump(check_report({file.propositions, f}, automaton, r, cfg.retrieval.smoothing));
    return kOk;
}

int cmd_retrieve(const Options& o, std::ostream& out) {
    if (o.question.empty() && o.formula.empty()) throw InvalidInput("retrieve needs --question or --formula");
    if (o.fixture.empty() && o.frames.empty()) throw InvalidInput("retrieve needs --fixture or --frames");
    if (!o.choices.empty()) {
        if (o.frames.empty()) throw InvalidInput("--choice needs --frames: there are no images to show the answerer");
        if (trim(o.question).empty()) throw InvalidInput("--choice needs --question");
        if (o.choices.size() < 2) throw InvalidInput("give at least two --choice options");
    }
    auto cfg = load_config(o);
    Remote remote;

    std::optional<MatrixFile> fixture;
    if (!o.fixture.empty()) {
        fixture = load_matrix(o.fixture);
        cfg.retrieval.geometry = fixture->matrix.geometry();
    }

    VideoMeta video;
    if (fixture) {
        video.frames = fixture->video_length_frames.value_or(fixture->matrix.covered_frames());
    } else {
        video.images = list_frames(o.frames);
        video.frames = video.images.size();
    }

    std::unique_ptr<clients::Translator> translator;
    if (!o.formula.empty()) {
        if (!fixture) throw InvalidInput("--formula with --frames needs the propositions of a --fixture sidecar");
        translator = std::make_unique<clients::FixedTranslator>(
            clients::Translation{fixture->propositions, load_formula(o.formula, fixture->propositions)});
    } else {
        translator = std::make_unique<clients::LlmTranslator>(remote.transport(cfg),
                                                              require_model(cfg.translator_model, "translator"));
    }

    std::unique_ptr<clients::Detector> detector;
    if (fixture) {
        detector = std::make_unique<clients::FixtureDetector>(fixture->matrix, fixture->propositions);
    } else {
        detector = std::make_unique<clients::RemoteDetector>(remote.transport(cfg),
                                                             require_model(cfg.detector_model, "detector"));
    }

    // A fixture's propositions are positional; a live translation must agree with them.
    clients::Translator* used = translator.get();
    std::unique_ptr<clients::Translator> checked;
    if (fixture && o.formula.empty()) {
        const auto t = translator->translate(o.question);
        if (!(t.propositions == fixture->propositions)) {
            throw InvalidInput("translated propositions differ from the fixture's; pass --formula instead");
        }
        checked = std::make_unique<clients::FixedTranslator>(t);
        used = checked.get();
    }

    LlmHandle llm;
    const LlmHandle* ext = nullptr;
    if (cfg.extension_source == "llm") {
        llm = {&remote.transport(cfg), require_model(cfg.translator_model, "translator")};
        ext = &llm;
    }

    const auto result = run_pipeline(o.question, *detector, *used, video, cfg.retrieval, ext);
    auto report = retrieval_report(result, cfg.retrieval);
    if (!o.choices.empty()) {
        if (result.sampled_frames.empty()) {
            report["answer"] = nullptr;
        } else {
            std::vector<std::filesystem::path> shown;
            for (std::size_t i : result.sampled_frames) shown.push_back(video.images.at(i));
            const auto a = clients::answer(remote.transport(cfg), require_model(cfg.answer_model, "answer"),
                                           o.question, o.choices, shown);
            nlohmann::ordered_json aj;
            aj["choice"] = a.choice ? nlohmann::ordered_json(*a.choice) : nlohmann::ordered_json(nullptr);
            aj["text"] = a.choice ? nlohmann::ordered_json(o.choices[*a.choice]) : nlohmann::ordered_json(nullptr);
            aj["raw"] = a.raw;
            report["answer"] = std::move(aj);
        }
    }
    if (o.emit_trim) {
        report["trim_command"] =
            result.interval ? nlohmann::ordered_json(trim_command(
                                  *result.interval, cfg.trim_template.empty() ? kDefaultTrimTemplate : cfg.trim_template))
                            : nlohmann::ordered_json(nullptr);
    }
    out << dump(report);
    return kOk;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
    if (o.pairs.empty()) throw InvalidInput("calibrate needs --pairs");
    const auto pairs = load_pairs(o.pairs);
    out << dump(calibration_json(select_threshold(pairs)));
    return kOk;
}

int cmd_build_pairs(const Options& o, std::ostream& out) {
    if (o.positives.empty()) throw InvalidInput("build-pairs needs --positives");
    const auto positives = load_positives(o.positives);
    out << format_labeled_pairs(build_pairs(positives, o.seed));
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Temporal-logic video segment retrieval", "tlr"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tlr 0.3.0");
    Options o;
    app.add_flag("-v,--verbose", o.verbose, "Debug logging on stderr");

    auto* translate = app.add_subcommand("translate", "Question to propositions and formula");
    translate->add_option("--question", o.question, "Question text")->required();
    translate->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    translate->add_option("--reply", o.reply, "Use this canned model reply instead of the endpoint")
        ->check(CLI::ExistingFile);
    translate->add_flag("--no-cache", o.no_cache, "Bypass the reply cache");

    auto* checkc = app.add_subcommand("check", "Satisfaction probability of a formula on a detection matrix");
    checkc->add_option("--fixture", o.fixture, "Detection matrix CSV (sidecar JSON alongside)")->required();
    checkc->add_option("--formula", o.formula, "File holding the formula")->required();
    checkc->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);

    auto* retrieve = app.add_subcommand("retrieve", "Search a video for the segment a question is about");
    retrieve->add_option("--question", o.question, "Question text");
    retrieve->add_option("--formula", o.formula, "File holding the formula (skips translation)");
    retrieve->add_option("--fixture", o.fixture, "Offline detection matrix CSV");
    retrieve->add_option("--frames", o.frames, "Directory of extracted frame images")->check(CLI::ExistingDirectory);
    retrieve->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    retrieve->add_option("--choice", o.choices, "Answer option (repeat); answers over the sampled frames");
    retrieve->add_flag("--emit-trim-cmd", o.emit_trim, "Add a trim command line for the interval to the report");
    retrieve->add_flag("--no-cache", o.no_cache, "Bypass the reply cache");

    auto* calibrate = app.add_subcommand("calibrate", "Accuracy-maximizing threshold and ROC from scored pairs");
    calibrate->add_option("--pairs", o.pairs, "CSV with score,label")->required();

    auto* build = app.add_subcommand("build-pairs", "Positive and shuffled negative pairs for calibration");
    build->add_option("--positives", o.positives, "CSV with item,caption")->required();
    build->add_option("--seed", o.seed, "Random seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputFailure;
    }

    if (o.verbose) set_log_level(LogLevel::Debug);
    const auto previous = set_log_sink([&err](LogLevel level, std::string_view m) {
        err << "tlr: " << (level >= LogLevel::Warn ? "warning: " : "") << m << '\n';
    });
    struct Restore {
        LogSink sink;
        ~Restore() { set_log_sink(std::move(sink)); }
    } restore{previous};

    try {
        if (*translate) return cmd_translate(o, out);
        if (*checkc) return cmd_check(o, out);
        if (*retrieve) return cmd_retrieve(o, out);
        if (*calibrate) return cmd_calibrate(o, out);
        if (*build) return cmd_build_pairs(o, out);
    } catch (const ReplyError& e) {
        err << "tlr: error: " << e.what() << '\n';
        return kDomainFailure;
    } catch (const ParseError& e) {
        err << "tlr: error: " << e.what() << " (offset " << e.offset() << ")\n";
        return *translate ? kDomainFailure : kInputFailure;
    } catch (const TransportError& e) {
        err << "tlr: error: " << e.what() << '\n';
        return kInputFailure;
    } catch (const InvalidInput& e) {
        err << "tlr: error: " << e.what() << '\n';
        return kInputFailure;
    } catch (const Error& e) {
        err << "tlr: error: " << e.what() << '\n';
        return kDomainFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "tlr: error: " << e.what() << '\n';
        return kInputFailure;
    }
    return kInputFailure;
}

} // namespace tlr::cli
