#pragma once

#include <string>
#include <string_view>

namespace textspot {

/// How transcriptions are compared. Character classes are ASCII-only, so
/// results do not depend on the process locale.
struct NormalizationPolicy {
    bool case_fold = true;
    bool strip_edge_punctuation = true;
    int word_spotting_min_len = 3;  // counted in code points; must be >= 1
    bool word_spotting_alnum_only = true;
};

/// Upper-cases (when folding) and strips leading/trailing characters outside
/// [A-Za-z0-9]. May return an empty string; idempotent.
std::string normalize_transcription(std::string_view s, const NormalizationPolicy& policy = {});

/// Whether a ground-truth word counts for word spotting. Ineligible words are
/// treated as don't-care by the word-spotting protocol.
bool word_spotting_eligible(std::string_view gt_transcription, const NormalizationPolicy& policy = {});

/// Equality of normalized forms.
bool transcription_match(std::string_view pred, std::string_view gt, const NormalizationPolicy& policy = {});

}  // namespace textspot
