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

#include "tlr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "tlr/digest.hpp"
#include "tlr/error.hpp"

namespace tlr {

namespace {

std::string at(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", col " + std::to_string(col) + ": ";
}

} // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool quoted = false;     // inside quotes
    bool was_quoted = false; // current field started with a quote
    bool any = false;        // current row has content

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InvalidInput(at(rows.size() + 1, std::min(row.size(), rows.front().size()) + 1) + "expected " +
                               std::to_string(rows.front().size()) + " fields, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
        row.clear();
        any = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty() || was_quoted) {
                throw InvalidInput(at(rows.size() + 1, row.size() + 1) + "stray quote inside an unquoted field");
            }
            quoted = was_quoted = any = true;
            break;
        case ',':
            end_field();
            any = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            throw InvalidInput(at(rows.size() + 1, row.size() + 1) + "bare carriage return");
        case '\n':
            if (any || !field.empty() || !row.empty()) end_row();
            break;
        default:
            if (was_quoted) {
                throw InvalidInput(at(rows.size() + 1, row.size() + 1) + "text after a closing quote");
            }
            field += c;
            any = true;
        }
    }
    if (quoted) throw InvalidInput(at(rows.size() + 1, row.size() + 1) + "unterminated quoted field");
    if (any || !field.empty() || !row.empty()) end_row();
    return rows;
}

std::string format_csv(const std::vector<CsvRow>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            const auto& f = row[i];
            if (f.find_first_of(",\"\r\n") == std::string::npos) {
                out += f;
                continue;
            }
            out += '"';
            for (char c : f) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        }
        out += '\n';
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    for (int precision : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::optional<double> parse_double(std::string_view text) {
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    auto p = csv;
    p.replace_extension(".json");
    if (p == csv) p += ".json";
    return p;
}

MatrixFile matrix_from_text(std::string_view csv, const nlohmann::json& sidecar) {
    WindowGeometry g;
    std::vector<std::string> texts;
    std::optional<std::size_t> video_length;
    try {
        if (!sidecar.is_object()) throw InvalidInput("sidecar must be a JSON object");
        for (const auto& [key, _] : sidecar.items()) {
            if (key != "window_size" && key != "stride" && key != "fps" && key != "propositions" &&
                key != "video_length_frames") {
                throw InvalidInput("sidecar: unknown key \"" + key + "\"");
            }
        }
        g.window_size = sidecar.at("window_size").get<std::size_t>();
        g.stride = sidecar.at("stride").get<std::size_t>();
        g.fps = sidecar.at("fps").get<double>();
        texts = sidecar.at("propositions").get<std::vector<std::string>>();
        if (sidecar.contains("video_length_frames")) {
            video_length = sidecar.at("video_length_frames").get<std::size_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("sidecar: ") + e.what());
    }
    g.check();
    PropositionSet props(texts);

    const auto rows = parse_csv(csv);
    if (rows.empty()) throw InvalidInput(at(1, 1) + "missing header");
    const auto& header = rows.front();
    if (header.size() != props.size() + 1) {
        throw InvalidInput(at(1, std::min(header.size(), props.size() + 1) + 1) + "header has " +
                           std::to_string(header.size() - 1) + " proposition columns, sidecar lists " +
                           std::to_string(props.size()));
    }
    if (header[0] != "t") throw InvalidInput(at(1, 1) + "first header column must be \"t\"");
    for (std::size_t i = 0; i < props.size(); ++i) {
        if (header[i + 1] != "p" + std::to_string(i)) {
            throw InvalidInput(at(1, i + 2) + "expected header \"p" + std::to_string(i) + "\"");
        }
    }
    if (rows.size() < 2) throw InvalidInput(at(2, 1) + "no windows");

    std::vector<std::vector<double>> scores;
    scores.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const auto t = parse_double(row[0]);
        if (!t || *t != static_cast<double>(r - 1)) {
            throw InvalidInput(at(r + 1, 1) + "expected window index " + std::to_string(r - 1) + ", found \"" +
                               row[0] + "\"");
        }
        std::vector<double> values;
        values.reserve(props.size());
        for (std::size_t c = 1; c < row.size(); ++c) {
            const auto v = parse_double(row[c]);
            if (!v) throw InvalidInput(at(r + 1, c + 1) + "not a number: \"" + row[c] + "\"");
            if (*v < 0.0 || *v > 1.0) throw InvalidInput(at(r + 1, c + 1) + "score outside [0, 1]: " + row[c]);
            values.push_back(*v);
        }
        scores.push_back(std::move(values));
    }
    MatrixFile out{DetectionMatrix(std::move(scores), g), std::move(props), video_length};
    if (video_length && *video_length < out.matrix.covered_frames()) {
        throw InvalidInput("sidecar: video_length_frames is shorter than the windows in the matrix");
    }
    return out;
}

std::string matrix_csv(const DetectionMatrix& m) {
    std::vector<CsvRow> rows;
    CsvRow header{"t"};
    for (std::size_t i = 0; i < m.propositions(); ++i) header.push_back("p" + std::to_string(i));
    rows.push_back(std::move(header));
    for (std::size_t t = 0; t < m.windows(); ++t) {
        CsvRow row{std::to_string(t)};
        for (double v : m.row(t)) row.push_back(format_double(v));
        rows.push_back(std::move(row));
    }
    return format_csv(rows);
}

nlohmann::json matrix_sidecar(const MatrixFile& file) {
    const auto& g = file.matrix.geometry();
    nlohmann::json j{{"window_size", g.window_size},
                     {"stride", g.stride},
                     {"fps", g.fps},
                     {"propositions", file.propositions.texts()}};
    if (file.video_length_frames) j["video_length_frames"] = *file.video_length_frames;
    return j;
}

MatrixFile load_matrix(const std::filesystem::path& csv) {
    const auto meta = sidecar_path(csv);
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(read_file(meta));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(meta.string() + ": " + e.what());
    }
    try {
        return matrix_from_text(read_file(csv), sidecar);
    } catch (const InvalidInput& e) {
        throw InvalidInput(csv.string() + ": " + e.what());
    }
}

void save_matrix(const std::filesystem::path& csv, const MatrixFile& file) {
    if (file.matrix.propositions() != file.propositions.size()) {
        throw InvalidInput("matrix width differs from the proposition count");
    }
    write_file(csv, matrix_csv(file.matrix));
    write_file(sidecar_path(csv), matrix_sidecar(file).dump(2) + "\n");
}

namespace {

std::vector<CsvRow> body(std::string_view csv, const CsvRow& expected_header) {
    auto rows = parse_csv(csv);
    if (rows.empty()) throw InvalidInput(at(1, 1) + "missing header");
    const auto& h = rows.front();
    for (std::size_t i = 0; i < expected_header.size(); ++i) {
        if (i >= h.size() || h[i] != expected_header[i]) {
            throw InvalidInput(at(1, i + 1) + "expected header \"" + expected_header[i] + "\"");
        }
    }
    if (h.size() != expected_header.size()) throw InvalidInput(at(1, expected_header.size() + 1) + "extra column");
    rows.erase(rows.begin());
    return rows;
}

} // namespace

std::vector<ScoredPair> parse_pairs(std::string_view csv) {
    const auto rows = body(csv, {"score", "label"});
    std::vector<ScoredPair> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto score = parse_double(rows[r][0]);
        if (!score || *score < 0.0 || *score > 1.0) {
            throw InvalidInput(at(r + 2, 1) + "score must be a number in [0, 1], found \"" + rows[r][0] + "\"");
        }
        const auto& l = rows[r][1];
        bool label;
        if (l == "1" || l == "true") label = true;
        else if (l == "0" || l == "false") label = false;
        else throw InvalidInput(at(r + 2, 2) + "label must be 0, 1, true or false, found \"" + l + "\"");
        out.push_back({*score, label});
    }
    return out;
}

std::vector<ScoredPair> load_pairs(const std::filesystem::path& path) {
    try {
        return parse_pairs(read_file(path));
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

std::vector<Positive> parse_positives(std::string_view csv) {
    const auto rows = body(csv, {"item", "caption"});
    std::vector<Positive> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r[0], r[1]});
    return out;
}

std::vector<Positive> load_positives(const std::filesystem::path& path) {
    try {
        return parse_positives(read_file(path));
    } catch (const InvalidInput& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

std::string format_labeled_pairs(const std::vector<LabeledPair>& pairs) {
    std::vector<CsvRow> rows{{"item", "caption", "label"}};
    for (const auto& p : pairs) rows.push_back({p.item, p.caption, p.label ? "1" : "0"});
    return format_csv(rows);
}

void write_file(const std::filesystem::path& path, std::string_view data) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InvalidInput("cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) throw InvalidInput("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw InvalidInput("cannot rename " + tmp.string() + ": " + ec.message());
}

} // namespace tlr
