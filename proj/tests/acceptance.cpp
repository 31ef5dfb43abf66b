// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "textspot/annotation.hpp"
#include "textspot/cli.hpp"
#include "textspot/geometry.hpp"
#include "textspot/io.hpp"
#include "textspot/lexicon.hpp"
#include "textspot/matching.hpp"
#include "textspot/metrics.hpp"

using namespace textspot;
using namespace textspot::testing;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

int run_cli(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
    args.insert(args.begin(), "textspot");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

std::string trim_newlines(std::string s) {
    while (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

// ---------------------------------------------------------------------------

Verdict table_totals() {
    std::vector<SubsetStats> rows;
    for (const PublishedRow& r : kPublishedRows) rows.push_back(r.stats);
    const SubsetStats t = aggregate_stats(rows);
    Verdict v;
    v.ok = t == kPublishedTotal;
    v.detail = "TOTAL " + std::to_string(t.images) + " " + std::to_string(t.instances) + " " + std::to_string(t.legible);
    return v;
}

Verdict geometry_oracle() {
    Verdict v;
    auto analytic = [&](const char* name, const Ring& a, const Ring& b, double expected) {
        const double got = iou(Polygon(a), Polygon(b));
        if (std::abs(got - expected) > 1e-12) {
            v.ok = false;
            v.detail += std::string(name) + " gave " + std::to_string(got) + "; ";
        }
    };
    analytic("identity", rect(0, 0, 1, 1), rect(0, 0, 1, 1), 1.0);
    analytic("half shift", rect(0, 0, 1, 1), rect(0.5, 0, 1.5, 1), 1.0 / 3.0);
    analytic("quarter corner", rect(0, 0, 1, 1), rect(0.5, 0.5, 1.5, 1.5), 0.25 / 1.75);
    analytic("containment", rect(0, 0, 2, 2), rect(0.5, 0.5, 1.5, 1.5), 0.25);
    analytic("shared edge", rect(0, 0, 1, 1), rect(1, 0, 2, 1), 0.0);
    analytic("corner touch", rect(0, 0, 1, 1), rect(1, 1, 2, 2), 0.0);
    analytic("disjoint", rect(0, 0, 1, 1), rect(5, 5, 6, 6), 0.0);

    std::mt19937_64 rng(20190701);
    std::uniform_real_distribution<double> centre(25.0, 75.0), offset(-15.0, 15.0);
    double worst_z = 0.0;
    int overlapping = 0;
    for (int pair = 0; pair < 100; ++pair) {
        const double cx = centre(rng), cy = centre(rng);
        const Ring a = pair % 2 ? random_star_polygon(rng, cx, cy, 6.0, 22.0, 3, 12)
                                : random_convex_polygon(rng, cx, cy, 18.0, 10.0, 3, 10);
        const Ring b = random_star_polygon(rng, cx + offset(rng), cy + offset(rng), 6.0, 22.0, 3, 12);
        const double q = iou(Polygon(a), Polygon(b));
        const PairSampleCounts c = sample_pair(a, b, 1'000'000, rng);
        const std::uint64_t n_union = c.in_a + c.in_b - c.in_both;
        const double q_hat = n_union ? static_cast<double>(c.in_both) / static_cast<double>(n_union) : 0.0;
        const double sigma = n_union ? std::sqrt(q * (1.0 - q) / static_cast<double>(n_union)) : 0.0;
        overlapping += q > 0.0;
        const double diff = std::abs(q_hat - q);
        if (sigma == 0.0) {
            if (diff != 0.0) {
                v.ok = false;
                v.detail += "pair " + std::to_string(pair) + " sampled overlap where clipping found none; ";
            }
            continue;
        }
        worst_z = std::max(worst_z, diff / sigma);
        if (diff > 3.0 * sigma) {
            v.ok = false;
            char buf[160];
            std::snprintf(buf, sizeof buf, "pair %d: clip %.6f sample %.6f (%.2f sigma); ", pair, q, q_hat, diff / sigma);
            v.detail += buf;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "7 analytic cases, 100 pairs (%d overlapping), worst deviation %.2f sigma", overlapping,
                  worst_z);
    v.detail = v.detail.empty() ? buf : v.detail + buf;
    return v;
}

Verdict edit_distance_oracle() {
    Verdict v;
    const auto words = all_strings("abc", 5);
    std::size_t pairs = 0;
    for (const auto& a : words) {
        for (const auto& b : words) {
            ++pairs;
            if (edit_distance(a, b) != static_cast<std::size_t>(recursive_levenshtein(a, b))) {
                v.ok = false;
                v.detail = "mismatch on '" + a + "' vs '" + b + "'; ";
            }
        }
    }
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const std::string a = random_string(rng, "abcdefgh", 7), b = random_string(rng, "abcdefgh", 7);
        ++pairs;
        if (edit_distance(a, b) != static_cast<std::size_t>(recursive_levenshtein(a, b))) {
            v.ok = false;
            v.detail = "mismatch on '" + a + "' vs '" + b + "'; ";
        }
    }
    v.detail += std::to_string(pairs) + " pairs compared";
    return v;
}

Verdict wed_degeneracy() {
    Verdict v;
    std::mt19937_64 rng(4);
    const std::string alphabet = "abcdefgHIJ";
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const std::string pred = random_string(rng, alphabet, 8);
        const std::string cand = random_string(rng, alphabet, 8);
        const double diff = std::abs(weighted_edit_distance(pred, one_hot(pred, alphabet), cand) -
                                     static_cast<double>(edit_distance(pred, cand)));
        worst = std::max(worst, diff);
        if (diff > 1e-9) v.ok = false;
    }
    v.detail = "500 pairs, largest difference " + std::to_string(worst);
    return v;
}

Verdict matching_properties() {
    Verdict v;
    std::mt19937_64 rng(5);
    const std::vector<double> thresholds{0.3, 0.5, 0.7, 0.9};
    int property_failures = 0, agree = 0, nonempty = 0;
    std::string log;
    for (int scene_no = 0; scene_no < 1000; ++scene_no) {
        const Scene s = random_scene(rng, "s" + std::to_string(scene_no));
        std::vector<MatchResult> results;
        for (double t : thresholds) {
            MatchOptions o;
            o.iou_threshold = t;
            results.push_back(match_instances(s.gts, s.preds, o));
            const std::string bad = match_property_violation(s, results.back(), t);
            if (!bad.empty()) {
                ++property_failures;
                log += "  scene " + std::to_string(scene_no) + " @" + std::to_string(t) + ": " + bad + "\n";
            }
        }
        for (std::size_t k = 1; k < results.size(); ++k) {
            const auto& lo = results[k - 1].pairs;
            for (const MatchedPair& p : results[k].pairs) {
                if (std::find(lo.begin(), lo.end(), p) == lo.end()) {
                    ++property_failures;
                    log += "  scene " + std::to_string(scene_no) + ": pair lost when lowering the threshold\n";
                }
            }
            if (results[k].pairs.size() > lo.size()) ++property_failures;
        }

        const MatchResult& r = results[1];
        nonempty += !r.pairs.empty();
        std::vector<std::vector<bool>> edge;
        for (std::size_t g = 0; g < s.gts.size(); ++g) {
            if (!s.gts[g].legible) continue;
            std::vector<bool> row;
            for (std::size_t p = 0; p < s.preds.size(); ++p) {
                const bool suppressed =
                    std::find(r.suppressed_pred.begin(), r.suppressed_pred.end(), p) != r.suppressed_pred.end();
                row.push_back(!suppressed && iou(s.gts[g].polygon, s.preds[p].polygon) > 0.5);
            }
            edge.push_back(std::move(row));
        }
        const std::size_t best = exhaustive_max_matching(edge);
        if (best == r.pairs.size()) {
            ++agree;
        } else {
            log += "  divergence in scene " + std::to_string(scene_no) + ": greedy " + std::to_string(r.pairs.size()) +
                   ", maximum " + std::to_string(best) + "\n";
        }
    }
    v.ok = property_failures == 0 && agree >= 990;
    v.detail = std::to_string(property_failures) + " property violations, greedy = maximum in " +
               std::to_string(agree) + "/1000 scenes, " + std::to_string(nonempty) + " scenes with pairs";
    if (!log.empty()) v.detail += "\n" + trim_newlines(log);
    return v;
}

Verdict protocol_fixture() {
    Verdict v;
    const ProtocolFixture f = hello_fixture();
    const EvalReport r = evaluate(f.gt, f.preds);
    const bool e2e = r.precision == 0.5 && r.recall == 1.0 && r.hmean == 2.0 / 3.0 &&
                     summary_line(r) == "P=0.500000 R=1.000000 H=0.666667";

    const ProtocolFixture w = short_word_fixture();
    EvalOptions o;
    o.protocol = Protocol::kWordSpotting;
    const EvalReport ws = evaluate(w.gt, w.preds, o);
    const bool spotting = ws.precision == 1.0 && ws.recall == 1.0 && ws.hmean == 1.0 && ws.totals == Counts{1, 0, 0};

    v.ok = e2e && spotting;
    v.detail = "end-to-end " + summary_line(r) + "; word spotting " + summary_line(ws);
    return v;
}

Verdict round_trip() {
    Verdict v;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> images(1, 100), instances(0, 1000);
    std::size_t total_instances = 0;
    for (int k = 0; k < 50; ++k) {
        const bool largest = k == 49;
        const Dataset d = random_dataset(rng, largest ? 100 : images(rng), largest ? 1000 : instances(rng));
        total_instances += d.instances.size();
        const std::string first = serialize_coco_text(d);
        const std::string second = serialize_coco_text(d);
        const Dataset back = parse_coco_text(first, d.subset_name);
        if (first != second) {
            v.ok = false;
            v.detail += "dataset " + std::to_string(k) + " serialized differently twice; ";
        }
        if (!(back == d)) {
            v.ok = false;
            v.detail += "dataset " + std::to_string(k) + " changed in a round trip; ";
        }
        if (serialize_coco_text(back) != first) {
            v.ok = false;
            v.detail += "dataset " + std::to_string(k) + " re-serialized differently; ";
        }
    }
    v.detail += "50 datasets, " + std::to_string(total_instances) + " instances";
    return v;
}

Verdict icdar_compatibility() {
    Verdict v;
    TempDir dir;
    // Ground truth and a submission in the plain ICDAR text formats, including
    // a BOM, CRLF endings, a quoted transcription and a don't-care line.
    dir.write("gt/gt_img_1.txt",
              "\xEF\xBB\xBF" "0,0,100,0,100,20,0,20,HELLO\r\n200,0,260,0,260,20,200,20,###\r\n"
              "0,40,60,40,60,60,0,60,\"a,b\"\r\n");
    dir.write("res/res_img_1.txt", "0,0,80,0,80,20,0,20,hello\n500,500,540,500,540,520,500,520,XYZ\n"
                                   "0,40,60,40,60,60,0,60,\"a,b\"\n205,2,255,2,255,18,205,18,NOISE\n");
    std::string out, err;
    const int code = run_cli({"evaluate", "--gt", (dir.path() / "gt").string(), "--pred", (dir.path() / "res").string()},
                             &out, &err);
    const std::string summary = trim_newlines(err);
    v.ok = code == 0 && summary == "P=0.666667 R=1.000000 H=0.800000";
    v.detail = "trained-model scores are not reproduced (no network, no models); ICDAR text ground truth and "
               "submission files score as " +
               summary;
    return v;
}

Verdict parallel_determinism() {
    Verdict v;
    TempDir dir;
    std::mt19937_64 rng(9);
    ProtocolFixture f;
    for (int i = 0; i < 200; ++i) {
        const std::string id = "image_" + std::to_string(i);
        Scene s = random_scene(rng, id);
        for (std::size_t k = 0; k < s.preds.size(); k += 3) s.preds[k].transcription = "MISS";
        f.gt[id] = std::move(s.gts);
        f.preds[id] = std::move(s.preds);
    }
    Dataset d;
    std::size_t n = 0;
    for (const auto& [id, gts] : f.gt) {
        d.images.push_back({id, id + ".jpg", 400, 400, {}});
        for (TextInstance g : gts) {
            g.id = std::to_string(n++);
            d.instances.push_back(std::move(g));
        }
    }
    const auto gt = dir.write("gt.json", serialize_coco_text(d));
    const auto pred = dir.write("pred.jsonl", predictions_to_jsonl(f.preds));
    const auto one = dir.path() / "jobs1.json", eight = dir.path() / "jobs8.json";
    ::unsetenv("TEXTSPOT_EVAL_NO_PARALLEL");
    std::string s1, s8;
    const int c1 = run_cli({"evaluate", "--gt", gt.string(), "--pred", pred.string(), "--jobs", "1", "-o", one.string()}, &s1);
    const int c8 = run_cli({"evaluate", "--gt", gt.string(), "--pred", pred.string(), "--jobs", "8", "-o", eight.string()}, &s8);
    const std::string a = read_text_file(one), b = read_text_file(eight);
    v.ok = c1 == 0 && c8 == 0 && a == b && s1 == s8 && !a.empty();
    v.detail = "200 images, reports of " + std::to_string(a.size()) + " and " + std::to_string(b.size()) + " bytes " +
               (a == b ? "identical" : "differ") + ", " + trim_newlines(s1);
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* name;
        double budget_seconds;
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "subset statistics sum to the published total", 1.0, table_totals},
        {2, "polygon IoU agrees with Monte-Carlo sampling", 120.0, geometry_oracle},
        {3, "edit distance agrees with the recursive definition", 60.0, edit_distance_oracle},
        {4, "weighted edit distance with one-hot rows equals edit distance", 10.0, wed_degeneracy},
        {5, "matching properties on random scenes", 60.0, matching_properties},
        {6, "protocol hand fixture", 1.0, protocol_fixture},
        {7, "annotation round trip and serializer determinism", 30.0, round_trip},
        {8, "ICDAR format compatibility (published model scores not reproduced)", 10.0, icdar_compatibility},
        {9, "evaluation reports identical for 1 and 8 jobs", 60.0, parallel_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = Clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (seconds > c.budget_seconds) {
            v.ok = false;
            v.detail += " (over time budget)";
        }
        failures += !v.ok;
        std::printf("%s criterion %d: %s [%.2fs] -- %s\n", v.ok ? "PASS" : "FAIL", c.number, c.name, seconds,
                    v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
