#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "textspot/geometry.hpp"

namespace textspot {

/// Per-decoding-step character distributions emitted by a recognizer.
/// Row i is the distribution for the i-th emitted character.
class CharProbMatrix {
public:
    /// Throws LexiconError when a row has the wrong width, an entry leaves
    /// [0, 1], a row does not sum to 1 within 1e-6, or the alphabet repeats
    /// a character.
    CharProbMatrix(std::u32string alphabet, std::vector<std::vector<double>> rows);

    static CharProbMatrix from_utf8(std::string_view alphabet, std::vector<std::vector<double>> rows);

    const std::u32string& alphabet() const noexcept { return alphabet_; }
    const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
    std::size_t row_count() const noexcept { return rows_.size(); }

    /// Zero for characters outside the alphabet.
    double probability(std::size_t row, char32_t c) const noexcept;

    bool operator==(const CharProbMatrix&) const = default;

private:
    std::u32string alphabet_;
    std::vector<std::vector<double>> rows_;
};

struct Prediction {
    std::string image_id;
    Polygon polygon;
    std::string transcription;
    double confidence = 1.0;
    std::optional<CharProbMatrix> char_probs;

    bool operator==(const Prediction&) const = default;
};

}  // namespace textspot
