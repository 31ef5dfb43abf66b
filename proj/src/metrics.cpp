#include "textspot/metrics.hpp"

#include <atomic>
#include <exception>
#include <optional>
#include <thread>

#include "format.hpp"
#include "textspot/error.hpp"

namespace textspot {
namespace {

struct ImageOutcome {
    Counts counts;
    std::vector<InstanceError> errors;
};

ImageOutcome evaluate_image(const std::string& image_id, const std::vector<TextInstance>& gts,
                            const std::vector<Prediction>& preds, const EvalOptions& options) {
    ImageOutcome out;

    std::vector<PreparedPolygon> gt_polys;
    std::vector<const TextInstance*> gt_refs;
    std::vector<bool> care;
    for (std::size_t i = 0; i < gts.size(); ++i) {
        try {
            gt_polys.emplace_back(gts[i].polygon);
        } catch (const GeometryError& e) {
            out.errors.push_back({image_id, "gt", i, e.what()});
            continue;
        }
        const TextInstance& g = gts[i];
        bool is_care = g.legible && g.transcription.has_value();
        if (is_care && options.protocol == Protocol::kWordSpotting) {
            is_care = word_spotting_eligible(*g.transcription, options.policy);
        }
        gt_refs.push_back(&g);
        care.push_back(is_care);
    }

    std::vector<PreparedPolygon> pred_polys;
    std::vector<const Prediction*> pred_refs;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        try {
            pred_polys.emplace_back(preds[i].polygon);
        } catch (const GeometryError& e) {
            out.errors.push_back({image_id, "pred", i, e.what()});
            continue;
        }
        pred_refs.push_back(&preds[i]);
    }

    const MatchResult m = match_prepared(gt_polys, care, pred_polys, options.match);
    const bool correct = options.lexicon != nullptr && options.lexicon->mode() != LexiconMode::kNone;
    for (const MatchedPair& pair : m.pairs) {
        const Prediction& p = *pred_refs[pair.pred];
        std::string text = p.transcription;
        if (correct) {
            NormalizedPrediction np = normalize_prediction(p.transcription, p.char_probs, options.policy);
            const auto hit = best_match(np.text, np.probs, *options.lexicon, image_id, options.wed_threshold);
            text = hit ? hit->word : std::move(np.text);
        }
        if (transcription_match(text, *gt_refs[pair.gt]->transcription, options.policy)) {
            ++out.counts.true_positives;
        } else {
            ++out.counts.false_positives;
            ++out.counts.false_negatives;
        }
    }
    out.counts.false_positives += m.unmatched_pred.size();
    out.counts.false_negatives += m.unmatched_gt.size();
    return out;
}

std::string counts_json(const Counts& c) {
    return "{\"fn\":" + std::to_string(c.false_negatives) + ",\"fp\":" + std::to_string(c.false_positives) +
           ",\"hmean\":" + detail::fixed(c.hmean(), 6) + ",\"precision\":" + detail::fixed(c.precision(), 6) +
           ",\"recall\":" + detail::fixed(c.recall(), 6) + ",\"tp\":" + std::to_string(c.true_positives) + "}";
}

}  // namespace

std::string_view to_string(Protocol p) noexcept {
    return p == Protocol::kEndToEnd ? "end_to_end" : "word_spotting";
}

double hmean(double precision, double recall) noexcept {
    const double s = precision + recall;
    return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

double Counts::precision() const noexcept {
    const auto d = true_positives + false_positives;
    return d ? static_cast<double>(true_positives) / static_cast<double>(d) : 0.0;
}

double Counts::recall() const noexcept {
    const auto d = true_positives + false_negatives;
    return d ? static_cast<double>(true_positives) / static_cast<double>(d) : 0.0;
}

Counts& Counts::operator+=(const Counts& o) noexcept {
    true_positives += o.true_positives;
    false_positives += o.false_positives;
    false_negatives += o.false_negatives;
    return *this;
}

GroundTruthByImage group_by_image(const Dataset& d) {
    GroundTruthByImage out;
    for (const ImageRecord& img : d.images) out[img.id];
    for (const TextInstance& inst : d.instances) out[inst.image_id].push_back(inst);
    return out;
}

EvalReport evaluate(const GroundTruthByImage& gt, const PredictionsByImage& preds, const EvalOptions& options) {
    for (const auto& [image, list] : preds) {
        if (!gt.contains(image)) throw Error("predictions reference unknown image '" + image + "'");
        for (const Prediction& p : list) {
            if (p.image_id != image) {
                throw Error("prediction filed under image '" + image + "' belongs to '" + p.image_id + "'");
            }
        }
    }

    std::vector<const std::string*> images;
    images.reserve(gt.size());
    for (const auto& entry : gt) images.push_back(&entry.first);

    std::vector<std::optional<ImageOutcome>> outcomes(images.size());
    std::vector<std::exception_ptr> failures(images.size());
    const std::vector<Prediction> no_preds;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < images.size(); i = next++) {
            const std::string& id = *images[i];
            const auto it = preds.find(id);
            try {
                outcomes[i] = evaluate_image(id, gt.at(id), it == preds.end() ? no_preds : it->second, options);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(images.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    EvalReport report;
    report.protocol = options.protocol;
    for (std::size_t i = 0; i < images.size(); ++i) {
        ImageOutcome& o = *outcomes[i];
        report.totals += o.counts;
        report.per_image.emplace(*images[i], o.counts);
        report.errors.insert(report.errors.end(), o.errors.begin(), o.errors.end());
    }
    report.precision = report.totals.precision();
    report.recall = report.totals.recall();
    report.hmean = textspot::hmean(report.precision, report.recall);
    return report;
}

std::string report_to_json(const EvalReport& r) {
    std::string out = "{\n  \"errors\": [";
    for (std::size_t i = 0; i < r.errors.size(); ++i) {
        const InstanceError& e = r.errors[i];
        out += i ? ",\n    " : "\n    ";
        out += "{\"image_id\":" + detail::quote(e.image_id) + ",\"index\":" + std::to_string(e.index) +
               ",\"kind\":" + detail::quote(e.kind) + ",\"message\":" + detail::quote(e.message) + "}";
    }
    out += r.errors.empty() ? "],\n" : "\n  ],\n";
    out += "  \"fn\": " + std::to_string(r.totals.false_negatives) + ",\n";
    out += "  \"fp\": " + std::to_string(r.totals.false_positives) + ",\n";
    out += "  \"hmean\": " + detail::fixed(r.hmean, 6) + ",\n";
    out += "  \"per_image\": {";
    std::size_t i = 0;
    for (const auto& [image, counts] : r.per_image) {
        out += i++ ? ",\n    " : "\n    ";
        out += detail::quote(image) + ": " + counts_json(counts);
    }
    out += r.per_image.empty() ? "},\n" : "\n  },\n";
    out += "  \"precision\": " + detail::fixed(r.precision, 6) + ",\n";
    out += "  \"protocol\": " + detail::quote(to_string(r.protocol)) + ",\n";
    out += "  \"recall\": " + detail::fixed(r.recall, 6) + ",\n";
    out += "  \"tp\": " + std::to_string(r.totals.true_positives) + "\n}\n";
    return out;
}

std::string report_to_csv(const EvalReport& r) {
    return "protocol,tp,fp,fn,precision,recall,hmean\n" + std::string(to_string(r.protocol)) + "," +
           std::to_string(r.totals.true_positives) + "," + std::to_string(r.totals.false_positives) + "," +
           std::to_string(r.totals.false_negatives) + "," + detail::fixed(r.precision, 6) + "," +
           detail::fixed(r.recall, 6) + "," + detail::fixed(r.hmean, 6) + "\n";
}

std::string report_to_table(const EvalReport& r) {
    std::string out;
    out += "protocol   " + std::string(to_string(r.protocol)) + "\n";
    out += "tp         " + std::to_string(r.totals.true_positives) + "\n";
    out += "fp         " + std::to_string(r.totals.false_positives) + "\n";
    out += "fn         " + std::to_string(r.totals.false_negatives) + "\n";
    out += "precision  " + detail::fixed(r.precision, 6) + "\n";
    out += "recall     " + detail::fixed(r.recall, 6) + "\n";
    out += "hmean      " + detail::fixed(r.hmean, 6) + "\n";
    if (!r.errors.empty()) out += "errors     " + std::to_string(r.errors.size()) + "\n";
    return out;
}

std::string summary_line(const EvalReport& r) {
    return "P=" + detail::fixed(r.precision, 6) + " R=" + detail::fixed(r.recall, 6) + " H=" + detail::fixed(r.hmean, 6);
}

}  // namespace textspot
