#include "textspot/normalize.hpp"

#include <algorithm>

#include "textspot/utf8.hpp"

namespace textspot {
namespace {

bool is_ascii_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

}  // namespace

std::string normalize_transcription(std::string_view s, const NormalizationPolicy& policy) {
    if (policy.strip_edge_punctuation) {
        const auto first = std::find_if(s.begin(), s.end(), is_ascii_alnum);
        const auto last = std::find_if(s.rbegin(), s.rend(), is_ascii_alnum).base();
        s = first < last ? std::string_view(&*first, static_cast<std::size_t>(last - first)) : std::string_view{};
    }
    std::string out(s);
    if (policy.case_fold) {
        for (char& c : out) {
            if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        }
    }
    return out;
}

bool word_spotting_eligible(std::string_view gt_transcription, const NormalizationPolicy& policy) {
    const std::string n = normalize_transcription(gt_transcription, policy);
    if (utf8::decode(n).size() < static_cast<std::size_t>(std::max(policy.word_spotting_min_len, 1))) return false;
    if (policy.word_spotting_alnum_only && !std::all_of(n.begin(), n.end(), is_ascii_alnum)) return false;
    return true;
}

bool transcription_match(std::string_view pred, std::string_view gt, const NormalizationPolicy& policy) {
    return normalize_transcription(pred, policy) == normalize_transcription(gt, policy);
}

}  // namespace textspot
