#include "textspot/matching.hpp"

#include <algorithm>
#include <string>

#include "textspot/error.hpp"

namespace textspot {
namespace {

bool absorbed(const PreparedPolygon& pred, std::span<const PreparedPolygon> gts, const std::vector<bool>& care,
              double overlap) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
        if (care[g]) continue;
        if (polygon_intersection_area(pred, gts[g]) / pred.area() > overlap) return true;
    }
    return false;
}

void check_threshold(double t) {
    if (!(t > 0.0 && t < 1.0)) throw MatchingError("iou threshold must lie in (0, 1), got " + std::to_string(t));
}

}  // namespace

MatchResult match_prepared(std::span<const PreparedPolygon> gts, const std::vector<bool>& care,
                           std::span<const PreparedPolygon> preds, const MatchOptions& options) {
    check_threshold(options.iou_threshold);
    if (care.size() != gts.size()) throw MatchingError("care mask size differs from ground-truth count");

    MatchResult result;
    std::vector<bool> suppressed(preds.size(), false);
    if (options.order == MatchOrder::kSuppressThenMatch) {
        for (std::size_t p = 0; p < preds.size(); ++p) {
            suppressed[p] = absorbed(preds[p], gts, care, options.dont_care_overlap);
        }
    }

    std::vector<MatchedPair> candidates;
    for (std::size_t g = 0; g < gts.size(); ++g) {
        if (!care[g]) continue;
        for (std::size_t p = 0; p < preds.size(); ++p) {
            if (suppressed[p] || !gts[g].box().overlaps(preds[p].box())) continue;
            const double v = iou(gts[g], preds[p]);
            if (v > options.iou_threshold) candidates.push_back({g, p, v});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const MatchedPair& a, const MatchedPair& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        if (a.gt != b.gt) return a.gt < b.gt;
        return a.pred < b.pred;
    });

    std::vector<bool> gt_used(gts.size(), false);
    std::vector<bool> pred_used(preds.size(), false);
    for (const MatchedPair& c : candidates) {
        if (gt_used[c.gt] || pred_used[c.pred]) continue;
        gt_used[c.gt] = pred_used[c.pred] = true;
        result.pairs.push_back(c);
    }

    for (std::size_t g = 0; g < gts.size(); ++g) {
        if (care[g] && !gt_used[g]) result.unmatched_gt.push_back(g);
    }
    for (std::size_t p = 0; p < preds.size(); ++p) {
        if (pred_used[p]) continue;
        if (options.order == MatchOrder::kMatchThenSuppress) {
            suppressed[p] = absorbed(preds[p], gts, care, options.dont_care_overlap);
        }
        (suppressed[p] ? result.suppressed_pred : result.unmatched_pred).push_back(p);
    }
    return result;
}

MatchResult match_instances(const std::vector<TextInstance>& gts, const std::vector<Prediction>& preds,
                            const MatchOptions& options) {
    check_threshold(options.iou_threshold);
    const std::string* image = nullptr;
    auto check_image = [&](const std::string& id) {
        if (!image) {
            image = &id;
        } else if (*image != id) {
            throw MatchingError("cross-image matching: '" + *image + "' vs '" + id + "'");
        }
    };
    std::vector<PreparedPolygon> gt_polys;
    std::vector<bool> care;
    gt_polys.reserve(gts.size());
    for (const TextInstance& g : gts) {
        check_image(g.image_id);
        gt_polys.emplace_back(g.polygon);
        care.push_back(g.legible);
    }
    std::vector<PreparedPolygon> pred_polys;
    pred_polys.reserve(preds.size());
    for (const Prediction& p : preds) {
        check_image(p.image_id);
        pred_polys.emplace_back(p.polygon);
    }
    return match_prepared(gt_polys, care, pred_polys, options);
}

}  // namespace textspot
