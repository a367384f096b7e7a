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

#include <filesystem>
#include <random>

#include "tlr/digest.hpp"
#include "tlr/error.hpp"
#include "tlr/io.hpp"

namespace tlr {
namespace {

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return "";
}

TEST(Csv, Rfc4180) {
    const auto rows = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,\"multi\nline\",\r\n");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (CsvRow{"a", "b,c", "say \"hi\""}));
    EXPECT_EQ(rows[1], (CsvRow{"1", "multi\nline", ""}));
    EXPECT_EQ(parse_csv("x,y").size(), 1u);
    EXPECT_EQ(parse_csv("x,y\n\n").size(), 1u);
    EXPECT_EQ(parse_csv(format_csv(rows)), rows);
}

TEST(Csv, Diagnostics) {
    EXPECT_NE(error_of([] { parse_csv("a,b\n1,2,3\n"); }).find("row 2"), std::string::npos);
    EXPECT_NE(error_of([] { parse_csv("a,\"b\n"); }).find("unterminated"), std::string::npos);
    EXPECT_NE(error_of([] { parse_csv("a,b\"c\n"); }).find("row 1, col 2"), std::string::npos);
    EXPECT_NE(error_of([] { parse_csv("\"a\"b\n"); }).find("after a closing quote"), std::string::npos);
}

TEST(Doubles, ShortestRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10000; ++i) {
        const double v = u(rng);
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_FALSE(parse_double("0.5x"));
    EXPECT_FALSE(parse_double(""));
    EXPECT_FALSE(parse_double("nan"));
}

nlohmann::json sidecar() {
    return {{"window_size", 3}, {"stride", 2}, {"fps", 2.5}, {"propositions", {"dog runs", "ball, red"}}};
}

TEST(Matrix, ParsesAndRoundTrips) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<std::vector<double>> rows;
    for (int t = 0; t < 20; ++t) rows.push_back({u(rng), u(rng)});
    MatrixFile file{DetectionMatrix(rows, {3, 2, 2.5}), PropositionSet{"dog runs", "ball, red"}, 50};
    const auto again = matrix_from_text(matrix_csv(file.matrix), matrix_sidecar(file));
    EXPECT_EQ(again.matrix, file.matrix); // bit-exact
    EXPECT_EQ(again.propositions, file.propositions);
    EXPECT_EQ(again.video_length_frames, std::optional<std::size_t>(50));

    const auto dir = std::filesystem::temp_directory_path() / "tlr_io_test";
    std::filesystem::create_directories(dir);
    save_matrix(dir / "m.csv", file);
    EXPECT_TRUE(std::filesystem::exists(dir / "m.json"));
    const auto loaded = load_matrix(dir / "m.csv");
    EXPECT_EQ(loaded.matrix, file.matrix);
    EXPECT_EQ(loaded.matrix.geometry(), file.matrix.geometry());
    std::filesystem::remove_all(dir);
}

TEST(Matrix, Diagnostics) {
    const auto s = sidecar();
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0,p1\n0,0.5,abc\n", s); }).find("row 2, col 3"), std::string::npos);
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0,p1\n0,0.5,1.5\n", s); }).find("row 2, col 3"), std::string::npos);
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0,p1\n1,0.5,0.5\n", s); }).find("row 2, col 1"), std::string::npos);
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0,p2\n0,0.5,0.5\n", s); }).find("row 1, col 3"), std::string::npos);
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0\n0,0.5\n", s); }).find("row 1"), std::string::npos);
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0,p1\n0,0.5\n", s); }).find("row 2"), std::string::npos);
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0,p1\n", s); }).find("no windows"), std::string::npos);
    auto extra = s;
    extra["colour"] = "blue";
    EXPECT_NE(error_of([&] { matrix_from_text("t,p0,p1\n0,0,0\n", extra); }).find("unknown key"), std::string::npos);
    auto missing = s;
    missing.erase("fps");
    EXPECT_FALSE(error_of([&] { matrix_from_text("t,p0,p1\n0,0,0\n", missing); }).empty());
    auto short_video = s;
    short_video["video_length_frames"] = 2;
    EXPECT_FALSE(error_of([&] { matrix_from_text("t,p0,p1\n0,0,0\n", short_video); }).empty());
}

TEST(Pairs, Parse) {
    const auto p = parse_pairs("score,label\n0.9,1\n0.2,false\n");
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0], (ScoredPair{0.9, true}));
    EXPECT_EQ(p[1], (ScoredPair{0.2, false}));
    EXPECT_NE(error_of([] { parse_pairs("score,label\n0.9,maybe\n"); }).find("row 2, col 2"), std::string::npos);
    EXPECT_NE(error_of([] { parse_pairs("label,score\n"); }).find("row 1, col 1"), std::string::npos);
}

TEST(Positives, ParseAndFormatPairs) {
    const auto p = parse_positives("item,caption\na.jpg,\"a dog, running\"\n");
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].caption, "a dog, running");
    EXPECT_EQ(format_labeled_pairs({{"a.jpg", "x, y", true}}), "item,caption,label\na.jpg,\"x, y\",1\n");
}

TEST(Digest, KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
    EXPECT_EQ(base64_encode("fo"), "Zm8=");
    EXPECT_EQ(base64_encode(""), "");
}

} // namespace
} // namespace tlr
