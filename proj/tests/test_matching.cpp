#include <doctest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "textspot/error.hpp"
#include "textspot/matching.hpp"

using namespace textspot;
using namespace textspot::testing;

namespace {

TextInstance gt(const Ring& r, bool legible = true, const std::string& image = "img") {
    return {"g", image, Polygon(r), legible ? std::optional<std::string>("W") : std::nullopt, legible, true, {}, {}, {}};
}

Prediction pred(const Ring& r, const std::string& image = "img") {
    return {image, Polygon(r), "W", 1.0, std::nullopt};
}

std::vector<std::vector<bool>> candidate_edges(const Scene& s, const MatchResult& r, double threshold) {
    std::set<std::size_t> suppressed(r.suppressed_pred.begin(), r.suppressed_pred.end());
    std::vector<std::vector<bool>> edge;
    for (const TextInstance& g : s.gts) {
        if (!g.legible) continue;
        std::vector<bool> row;
        for (std::size_t p = 0; p < s.preds.size(); ++p) {
            row.push_back(!suppressed.contains(p) && iou(g.polygon, s.preds[p].polygon) > threshold);
        }
        edge.push_back(std::move(row));
    }
    return edge;
}

}  // namespace

TEST_CASE("matching: identical square") {
    const MatchResult r = match_instances({gt(rect(0, 0, 10, 10))}, {pred(rect(0, 0, 10, 10))});
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0] == MatchedPair{0, 0, 1.0});
    CHECK(r.unmatched_gt.empty());
    CHECK(r.unmatched_pred.empty());
    CHECK(r.suppressed_pred.empty());
}

TEST_CASE("matching: one prediction over two ground truths") {
    const Ring p = rect(0, 0, 10, 10);
    const Ring g_low = rect(0, 4.5, 10, 10);  // IoU 0.55
    const Ring g_high = rect(0, 0, 10, 6);    // IoU 0.60
    CHECK(iou(Polygon(g_low), Polygon(p)) == doctest::Approx(0.55));
    CHECK(iou(Polygon(g_high), Polygon(p)) == doctest::Approx(0.60));

    const MatchResult r = match_instances({gt(g_low), gt(g_high)}, {pred(p)});
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].gt == 1);
    CHECK(r.unmatched_gt == std::vector<std::size_t>{0});

    // Every one-to-one assignment of the single prediction: the chosen one has the largest IoU.
    double best = 0.0;
    std::size_t best_gt = 99;
    for (std::size_t g = 0; g < 2; ++g) {
        const double v = iou(Polygon(g == 0 ? g_low : g_high), Polygon(p));
        if (v > 0.5 && v > best) best = v, best_gt = g;
    }
    CHECK(best_gt == r.pairs[0].gt);
}

TEST_CASE("matching: don't-care absorption") {
    const std::vector<TextInstance> gts{gt(rect(0, 0, 50, 50), false), gt(rect(100, 0, 120, 10))};
    SUBCASE("fully inside") {
        const MatchResult r = match_instances(gts, {pred(rect(10, 10, 20, 20))});
        CHECK(r.suppressed_pred == std::vector<std::size_t>{0});
        CHECK(r.pairs.empty());
        CHECK(r.unmatched_pred.empty());
        CHECK(r.unmatched_gt == std::vector<std::size_t>{1});
    }
    SUBCASE("exactly half inside stays") {
        const MatchResult r = match_instances(gts, {pred(rect(40, 0, 60, 10))});
        CHECK(r.suppressed_pred.empty());
        CHECK(r.unmatched_pred == std::vector<std::size_t>{0});
    }
    SUBCASE("match before suppress") {
        // A prediction over both a care word and a large don't-care region.
        const std::vector<TextInstance> g2{gt(rect(0, 0, 100, 100), false), gt(rect(0, 0, 20, 10))};
        const std::vector<Prediction> p2{pred(rect(0, 0, 20, 12))};
        CHECK(match_instances(g2, p2).suppressed_pred.size() == 1);
        MatchOptions o;
        o.order = MatchOrder::kMatchThenSuppress;
        const MatchResult r = match_instances(g2, p2, o);
        CHECK(r.pairs.size() == 1);
        CHECK(r.suppressed_pred.empty());
    }
}

TEST_CASE("matching: ties go to lower indices") {
    const MatchResult r =
        match_instances({gt(rect(0, 0, 10, 10)), gt(rect(0, 0, 10, 10))}, {pred(rect(0, 0, 10, 10)), pred(rect(0, 0, 10, 10))});
    REQUIRE(r.pairs.size() == 2);
    CHECK(r.pairs[0] == MatchedPair{0, 0, 1.0});
    CHECK(r.pairs[1] == MatchedPair{1, 1, 1.0});
}

TEST_CASE("matching: errors") {
    CHECK_THROWS_AS(match_instances({gt(rect(0, 0, 1, 1), true, "a")}, {pred(rect(0, 0, 1, 1), "b")}), MatchingError);
    try {
        match_instances({gt(rect(0, 0, 1, 1), true, "a")}, {pred(rect(0, 0, 1, 1), "b")});
    } catch (const MatchingError& e) {
        CHECK(std::string(e.what()).find("cross-image matching") != std::string::npos);
    }
    MatchOptions o;
    o.iou_threshold = 1.0;
    CHECK_THROWS_AS(match_instances({}, {}, o), MatchingError);
    o.iou_threshold = 0.0;
    CHECK_THROWS_AS(match_instances({}, {}, o), MatchingError);
    CHECK(match_instances({}, {}) == MatchResult{});
}

TEST_CASE("matching: properties on random scenes") {
    std::mt19937_64 rng(51);
    std::size_t divergences = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Scene s = random_scene(rng);
        MatchOptions o;
        const MatchResult r = match_instances(s.gts, s.preds, o);
        INFO("trial " << trial);
        CHECK(match_property_violation(s, r, o.iou_threshold) == "");

        o.iou_threshold = 0.7;
        const MatchResult strict = match_instances(s.gts, s.preds, o);
        CHECK(match_property_violation(s, strict, 0.7) == "");
        CHECK(strict.pairs.size() <= r.pairs.size());
        for (const MatchedPair& p : strict.pairs) {
            CHECK(std::find(r.pairs.begin(), r.pairs.end(), p) != r.pairs.end());
        }

        if (exhaustive_max_matching(candidate_edges(s, r, 0.5)) != r.pairs.size()) ++divergences;
        CHECK(match_instances(s.gts, s.preds) == r);
    }
    CHECK(divergences <= 3);
}
