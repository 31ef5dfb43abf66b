#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "oracles.hpp"
#include "textspot/annotation.hpp"
#include "textspot/matching.hpp"
#include "textspot/metrics.hpp"

namespace textspot::testing {

struct PublishedRow {
    const char* subset;
    SubsetStats stats;
};

/// Open Images V5 Text subset statistics and their published total.
inline const std::vector<PublishedRow> kPublishedRows = {
    {"train_1", {50878, 540057, 444001}}, {"train_2", {48877, 594836, 503171}},
    {"train_5", {49329, 621057, 496203}}, {"train_f", {41975, 597352, 471050}},
    {"validation", {16731, 218308, 158962}},
};
inline constexpr SubsetStats kPublishedTotal{207790, 2571610, 2073387};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("textspot-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline double cents(double v) { return std::round(v * 100.0) / 100.0; }

/// Random valid dataset whose coordinates sit on the 0.01 px grid used by the
/// canonical serializer, so a serialize/parse round trip is exact.
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n_images, std::size_t n_instances) {
    Dataset d;
    d.subset_name = "generated";
    std::uniform_int_distribution<int> size(64, 2048);
    std::uniform_int_distribution<int> coin(0, 9);
    for (std::size_t i = 0; i < n_images; ++i) {
        ImageRecord img{std::to_string(1000 + i), "img_" + std::to_string(i) + ".jpg", size(rng), size(rng), {}};
        if (coin(rng) == 0) img.extra["license"] = std::to_string(coin(rng));
        d.images.push_back(std::move(img));
    }
    if (n_images == 0) return d;

    std::uniform_int_distribution<std::size_t> pick_image(0, n_images - 1);
    const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-'.";
    for (std::size_t k = 0; k < n_instances; ++k) {
        const ImageRecord& img = d.images[pick_image(rng)];
        const double w = static_cast<double>(img.width), h = static_cast<double>(img.height);
        std::uniform_real_distribution<double> cx(0.25 * w, 0.75 * w), cy(0.25 * h, 0.75 * h);
        const double r_max = 0.2 * std::min(w, h);
        Ring ring;
        do {
            ring = random_star_polygon(rng, cx(rng), cy(rng), 0.3 * r_max, r_max, 4, 10);
            for (Point& p : ring) p = {cents(p.x), cents(p.y)};
        } while (!is_simple(ring));

        const bool legible = coin(rng) < 8;
        TextInstance inst{k % 3 == 0 ? "ann-" + std::to_string(k) : std::to_string(k), img.id, Polygon(ring),
                          std::nullopt, legible, coin(rng) < 5, {}, {}, {}};
        if (legible || coin(rng) < 3) inst.transcription = random_string(rng, alphabet, 12, 1);
        if (coin(rng) == 0) inst.extra["category_id"] = "1";
        if (coin(rng) == 0) inst.extra_attributes["language"] = "\"en\"";
        d.instances.push_back(std::move(inst));
    }
    return d;
}

struct Scene {
    std::vector<TextInstance> gts;
    std::vector<Prediction> preds;
};

/// Ground-truth stars scattered over a 300 px square (they may overlap),
/// jittered copies of most of them as predictions, plus a few strays.
inline Scene random_scene(std::mt19937_64& rng, const std::string& image_id = "scene") {
    Scene s;
    std::uniform_int_distribution<int> n_gt(0, 8), n_stray(0, 3), coin(0, 9);
    std::uniform_real_distribution<double> pos(0.0, 300.0), scale(0.85, 1.15);
    std::normal_distribution<double> jitter(0.0, 4.0);
    const int g = n_gt(rng);
    for (int i = 0; i < g; ++i) {
        Ring ring = random_star_polygon(rng, pos(rng), pos(rng), 12.0, 30.0, 4, 9);
        const bool legible = coin(rng) < 8;
        s.gts.push_back({image_id + "_g" + std::to_string(i), image_id, Polygon(ring),
                         legible ? std::optional<std::string>("W" + std::to_string(i)) : std::nullopt, legible, true,
                         {}, {}, {}});
        const int copies = coin(rng) < 7 ? (coin(rng) < 2 ? 2 : 1) : 0;
        for (int c = 0; c < copies; ++c) {
            const Box b = ring_box(ring);
            const double cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
            const double k = scale(rng), dx = jitter(rng), dy = jitter(rng);
            Ring moved;
            for (const Point& p : ring) moved.push_back({cx + k * (p.x - cx) + dx, cy + k * (p.y - cy) + dy});
            s.preds.push_back({image_id, Polygon(moved), "W" + std::to_string(i), 0.9, std::nullopt});
        }
    }
    const int strays = n_stray(rng);
    for (int i = 0; i < strays; ++i) {
        s.preds.push_back(
            {image_id, Polygon(random_star_polygon(rng, pos(rng), pos(rng), 8.0, 25.0, 3, 8)), "X", 0.5, std::nullopt});
    }
    std::shuffle(s.preds.begin(), s.preds.end(), rng);
    return s;
}

/// Checks a matching result against its definition. Returns the first
/// violated property, or an empty string.
inline std::string match_property_violation(const Scene& s, const MatchResult& r, double threshold) {
    const std::size_t n_gt = s.gts.size(), n_pred = s.preds.size();
    std::vector<int> gt_seen(n_gt, 0), pred_seen(n_pred, 0);
    for (const MatchedPair& p : r.pairs) {
        if (p.gt >= n_gt || p.pred >= n_pred) return "pair index out of range";
        ++gt_seen[p.gt];
        ++pred_seen[p.pred];
        if (!s.gts[p.gt].legible) return "don't-care ground truth matched";
        if (!(p.iou > threshold)) return "pair at or below threshold";
        if (std::abs(p.iou - iou(s.gts[p.gt].polygon, s.preds[p.pred].polygon)) > 1e-12) return "pair iou mismatch";
    }
    for (std::size_t g : r.unmatched_gt) {
        if (g >= n_gt) return "unmatched gt out of range";
        if (!s.gts[g].legible) return "don't-care ground truth listed as unmatched";
        ++gt_seen[g];
    }
    for (std::size_t p : r.unmatched_pred) {
        if (p >= n_pred) return "unmatched pred out of range";
        ++pred_seen[p];
    }
    for (std::size_t p : r.suppressed_pred) {
        if (p >= n_pred) return "suppressed pred out of range";
        ++pred_seen[p];
    }
    for (std::size_t g = 0; g < n_gt; ++g) {
        if (gt_seen[g] != (s.gts[g].legible ? 1 : 0)) return "ground truth not partitioned";
    }
    for (std::size_t p = 0; p < n_pred; ++p) {
        if (pred_seen[p] != 1) return "predictions not partitioned";
    }
    if (r.pairs.size() + r.unmatched_pred.size() + r.suppressed_pred.size() != n_pred) return "pred count identity";
    const auto care = static_cast<std::size_t>(
        std::count_if(s.gts.begin(), s.gts.end(), [](const TextInstance& t) { return t.legible; }));
    if (r.pairs.size() + r.unmatched_gt.size() != care) return "care count identity";
    for (std::size_t g : r.unmatched_gt) {
        for (std::size_t p : r.unmatched_pred) {
            if (iou(s.gts[g].polygon, s.preds[p].polygon) > threshold) return "matching not maximal";
        }
    }
    return {};
}

/// One care word "HELLO" and one don't-care region. The first prediction
/// covers the care word, the second is far from everything.
struct ProtocolFixture {
    GroundTruthByImage gt;
    PredictionsByImage preds;
};

inline ProtocolFixture hello_fixture() {
    ProtocolFixture f;
    const std::string img = "img_1";
    f.gt[img] = {
        TextInstance{"g0", img, Polygon(rect(0, 0, 100, 20)), "HELLO", true, true, {}, {}, {}},
        TextInstance{"g1", img, Polygon(rect(200, 0, 260, 20)), std::nullopt, false, true, {}, {}, {}},
    };
    // x from 0 to 80 over the 100 px word: IoU 0.8.
    f.preds[img] = {
        Prediction{img, Polygon(rect(0, 0, 80, 20)), "HELLO", 0.9, std::nullopt},
        Prediction{img, Polygon(rect(500, 500, 540, 520)), "XYZ", 0.7, std::nullopt},
    };
    return f;
}

/// Word-spotting variant: the second ground-truth word is two characters
/// long, and both words are read correctly.
inline ProtocolFixture short_word_fixture() {
    ProtocolFixture f;
    const std::string img = "img_1";
    f.gt[img] = {
        TextInstance{"g0", img, Polygon(rect(0, 0, 100, 20)), "HELLO", true, true, {}, {}, {}},
        TextInstance{"g1", img, Polygon(rect(200, 0, 240, 20)), "AB", true, true, {}, {}, {}},
    };
    f.preds[img] = {
        Prediction{img, Polygon(rect(0, 0, 80, 20)), "HELLO", 0.9, std::nullopt},
        Prediction{img, Polygon(rect(200, 0, 240, 20)), "AB", 0.8, std::nullopt},
    };
    return f;
}

}  // namespace textspot::testing
