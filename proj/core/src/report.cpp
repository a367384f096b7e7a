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

#include "tlr/report.hpp"

#include "tlr/clients/prompts.hpp"
#include "tlr/io.hpp"
#include "tlr/parse.hpp"

namespace tlr {

using nlohmann::ordered_json;

namespace {

ordered_json labels_json(LabelSet labels) {
    ordered_json a = ordered_json::array();
    for (PropId id : labels.ids()) a.push_back(id);
    return a;
}

ordered_json interval_o(const Interval& i) {
    return ordered_json{{"start_frame", i.start_frame},
                        {"end_frame", i.end_frame},
                        {"start_s", i.start_seconds()},
                        {"end_s", i.end_seconds()}};
}

ordered_json witness_o(const Witness& w, const PropositionSet& props) {
    ordered_json steps = ordered_json::array();
    for (const auto& s : w.steps) {
        ordered_json texts = ordered_json::array();
        for (PropId id : s.labels.ids()) texts.push_back(id < props.size() ? props[id].text : "p" + std::to_string(id));
        steps.push_back(ordered_json{{"window", s.window}, {"state", s.state}, {"labels", labels_json(s.labels)},
                                     {"label_texts", texts}});
    }
    return ordered_json{{"accept_layer", w.accept_layer}, {"mass", w.mass}, {"steps", steps}};
}

ordered_json satisfaction_o(const SatisfactionResult& r, const PropositionSet& props) {
    ordered_json j{{"probability", r.probability}, {"smoothed", r.smoothed}, {"satisfiable", r.probability > 0.0}};
    j["witness"] = r.witness ? witness_o(*r.witness, props) : ordered_json(nullptr);
    return j;
}

ordered_json translation_o(const clients::Translation& t) {
    return ordered_json{{"propositions", t.propositions.texts()},
                        {"formula", render(t.formula, t.propositions)},
                        {"formula_aliases", render_aliases(t.formula)}};
}

} // namespace

nlohmann::ordered_json interval_json(const Interval& interval) { return interval_o(interval); }

nlohmann::ordered_json translation_json(const clients::Translation& t) { return translation_o(t); }

nlohmann::ordered_json witness_json(const Witness& w, const PropositionSet& props) { return witness_o(w, props); }

nlohmann::ordered_json satisfaction_json(const SatisfactionResult& r, const PropositionSet& props) {
    return satisfaction_o(r, props);
}

nlohmann::ordered_json check_report(const clients::Translation& t, const VideoAutomaton& automaton,
                            const SatisfactionResult& r, const SmoothingParams& smoothing) {
    ordered_json j = translation_o(t);
    j["windows"] = automaton.layer_count();
    j["states"] = automaton.state_count();
    j["gamma"] = smoothing.gamma;
    j["tau"] = smoothing.tau;
    j["result"] = satisfaction_o(r, t.propositions);
    return j;
}

nlohmann::ordered_json retrieval_report(const RetrievalResult& r, const RetrievalConfig& cfg) {
    ordered_json j = translation_o({r.propositions, r.formula});
    j["checked_formula"] = render_aliases(r.checked_formula);
    j["prompt_version"] = clients::prompt_version();
    j["config"] = ordered_json{{"window_size", cfg.geometry.window_size},
                               {"stride", cfg.geometry.stride},
                               {"fps", cfg.geometry.fps},
                               {"prune_epsilon", cfg.build.prune_epsilon},
                               {"max_branches", cfg.build.max_branches},
                               {"gamma", cfg.smoothing.gamma},
                               {"tau", cfg.smoothing.tau},
                               {"tau_stop", cfg.tau_stop},
                               {"frame_budget", cfg.frame_budget},
                               {"anchor_anywhere", cfg.anchor_anywhere}};
    j["stop_layer"] = r.stop_layer;
    j["stopped_early"] = r.stopped_early;
    j["analysed_layer"] = r.analysed_layer;
    ordered_json scores = ordered_json::array();
    for (const auto& s : r.scores) scores.push_back(ordered_json{{"probability", s.probability}, {"smoothed", s.smoothed}});
    j["scores"] = scores;
    j["satisfaction"] = satisfaction_o(r.satisfaction, r.propositions);
    j["raw_interval"] = r.raw_interval ? interval_o(*r.raw_interval) : ordered_json(nullptr);
    j["extension"] = ordered_json{{"alpha", r.spans.alpha}, {"beta", r.spans.beta}};
    j["interval"] = r.interval ? interval_o(*r.interval) : ordered_json(nullptr);
    j["sampled_frames"] = r.sampled_frames;
    j["diagnostics"] = r.diagnostics;
    return j;
}

nlohmann::ordered_json calibration_json(const CalibrationReport& r) {
    ordered_json roc = ordered_json::array();
    for (const auto& p : r.roc) roc.push_back(ordered_json{{"fpr", p.fpr}, {"tpr", p.tpr}});
    return ordered_json{{"threshold", r.threshold},
                              {"accuracy", r.accuracy},
                              {"auc", r.auc},
                              {"pair_count", r.pair_count},
                              {"roc", roc}};
}

std::string trim_command(const Interval& interval, const std::string& tmpl) {
    return clients::fill(tmpl, {{"start", format_double(interval.start_seconds())},
                                {"end", format_double(interval.end_seconds())}});
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

} // namespace tlr
