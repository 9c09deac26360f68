#include "identik/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace identik {

double d_prime(const DistributionStats& a, const DistributionStats& b) {
    if (a.n < 2 || b.n < 2)
        throw DegenerateDistributions("d_prime needs n >= 2 on both sides");
    // min == max catches constant samples whose two-pass std dev comes out as
    // rounding noise instead of exactly zero.
    bool a_const = a.std_dev == 0.0 || a.min == a.max;
    bool b_const = b.std_dev == 0.0 || b.min == b.max;
    if (a_const && b_const)
        throw DegenerateDistributions("d_prime undefined: both distributions constant");
    double pooled = (a.std_dev * a.std_dev + b.std_dev * b.std_dev) / 2.0;
    return std::abs(a.mean - b.mean) / std::sqrt(pooled);
}

double empirical_quantile(std::span<const double> scores, double q) {
    if (scores.empty()) throw EmptyInput("empirical_quantile: empty input");
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    double rank = std::ceil(q * static_cast<double>(sorted.size())) - 1.0;
    auto idx = static_cast<std::size_t>(
        std::clamp(rank, 0.0, static_cast<double>(sorted.size() - 1)));
    return sorted[idx];
}

double delta_tail(std::span<const double> mated, std::span<const double> nonmated,
                  double tail_mass) {
    return empirical_quantile(mated, tail_mass) -
           empirical_quantile(nonmated, 1.0 - tail_mass);
}

DiffDistribution diff_distribution(const std::vector<RankOneResult>& results) {
    DiffDistribution out;
    std::size_t fpi = 0;
    for (const auto& r : results) {
        if (!r.mated_score) { ++out.n_singletons; continue; }
        if (!r.nonmated_score) { ++out.n_degenerate; continue; }
        double d = *r.mated_score - *r.nonmated_score;
        out.diffs.push_back(d);
        if (d <= 0.0) ++fpi;
    }
    if (out.diffs.empty()) throw NoMatedProbes("no probe has both scores");
    out.fpir = static_cast<double>(fpi) / static_cast<double>(out.diffs.size());
    return out;
}

ThresholdRates fixed_threshold_rates(std::span<const double> genuine,
                                     std::span<const double> impostor, double threshold) {
    if (genuine.empty() || impostor.empty())
        throw EmptyInput("fixed_threshold_rates: empty input");
    std::size_t fm = 0, fnm = 0;
    for (double s : impostor)
        if (s >= threshold) ++fm;
    for (double s : genuine)
        if (s < threshold) ++fnm;
    return {static_cast<double>(fm) / static_cast<double>(impostor.size()),
            static_cast<double>(fnm) / static_cast<double>(genuine.size())};
}

double threshold_for_fmr(std::span<const double> impostor, double target_fmr) {
    if (impostor.empty()) throw EmptyInput("threshold_for_fmr: empty input");
    if (!(target_fmr > 0.0 && target_fmr < 1.0))
        throw std::invalid_argument("target_fmr must be in (0, 1)");
    std::vector<double> sorted(impostor.begin(), impostor.end());
    std::sort(sorted.begin(), sorted.end());
    double n = static_cast<double>(sorted.size());
    // Scanning ascending, scores at or above sorted[i] number n - i.
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        if (static_cast<double>(sorted.size() - i) / n <= target_fmr) return sorted[i];
    }
    throw ErrorUnachievable("no observed score achieves FMR <= " +
                            std::to_string(target_fmr));
}

double open_set_fpir(std::span<const double> nonmated, double threshold) {
    if (nonmated.empty()) throw EmptyInput("open_set_fpir: empty input");
    std::size_t hits = 0;
    for (double s : nonmated)
        if (s >= threshold) ++hits;
    return static_cast<double>(hits) / static_cast<double>(nonmated.size());
}

namespace {

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width) {
    std::vector<HistogramBin> bins;
    auto n_bins = static_cast<std::size_t>(std::llround(2.0 / bin_width));
    bins.reserve(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i)
        bins.push_back({-1.0 + static_cast<double>(i) * bin_width,
                        -1.0 + static_cast<double>(i + 1) * bin_width, 0});
    for (double v : values) {
        auto i = static_cast<long long>(std::floor((v + 1.0) / bin_width));
        i = std::clamp<long long>(i, 0, static_cast<long long>(n_bins) - 1);
        ++bins[static_cast<std::size_t>(i)].count;
    }
    return bins;
}

}  // namespace

MetricReport build_report(const std::vector<RankOneResult>& results,
                          const OneToOneScores* one_to_one, const DemographicGroup& group,
                          const ReportParams& params) {
    MetricReport rep;
    rep.group = group;
    rep.n_probes = results.size();

    std::vector<double> mated, nonmated;
    for (const auto& r : results) {
        if (r.mated_score && r.nonmated_score) {
            mated.push_back(*r.mated_score);
            nonmated.push_back(*r.nonmated_score);
        }
    }
    auto dd = diff_distribution(results);
    rep.n_singletons = dd.n_singletons;
    rep.n_degenerate = dd.n_degenerate;
    rep.fpir_rank_one = dd.fpir;
    rep.diff_histogram = histogram(dd.diffs, params.hist_bin_width);

    rep.mated_stats = DistributionStats::from(mated);
    rep.nonmated_stats = DistributionStats::from(nonmated);
    try {
        rep.d_prime_rank_one = d_prime(rep.mated_stats, rep.nonmated_stats);
    } catch (const DegenerateDistributions& e) {
        rep.notes.push_back(std::string("d_prime(rank-one): ") + e.what());
    }
    rep.delta_tail_value = delta_tail(mated, nonmated, params.tail_mass);

    std::ostringstream qm, qn;
    qm << "mated_q" << params.tail_mass;
    qn << "nonmated_q" << 1.0 - params.tail_mass;
    rep.thresholds[qm.str()] = empirical_quantile(mated, params.tail_mass);
    rep.thresholds[qn.str()] = empirical_quantile(nonmated, 1.0 - params.tail_mass);

    if (one_to_one) {
        auto g = DistributionStats::from(one_to_one->genuine);
        auto i = DistributionStats::from(one_to_one->impostor);
        try {
            rep.d_prime_one_to_one = d_prime(g, i);
        } catch (const DegenerateDistributions& e) {
            rep.notes.push_back(std::string("d_prime(1-to-1): ") + e.what());
        }
        if (params.target_fmr) {
            try {
                double t = threshold_for_fmr(one_to_one->impostor, *params.target_fmr);
                rep.thresholds["one_to_one_fmr_target"] = t;
            } catch (const ErrorUnachievable& e) {
                rep.notes.push_back(std::string("threshold_for_fmr: ") + e.what());
            }
        }
        if (params.fixed_threshold) {
            rep.one_to_one_rates = fixed_threshold_rates(
                one_to_one->genuine, one_to_one->impostor, *params.fixed_threshold);
            rep.thresholds["fixed"] = *params.fixed_threshold;
        }
    }
    if (params.fixed_threshold)
        rep.thresholds["open_set_fpir_at_fixed"] =
            open_set_fpir(nonmated, *params.fixed_threshold);
    return rep;
}

namespace {

nlohmann::ordered_json stats_json(const DistributionStats& s) {
    return {{"n", s.n}, {"mean", s.mean}, {"std_dev", s.std_dev},
            {"min", s.min}, {"max", s.max}};
}

}  // namespace

std::string report_to_json(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["group"] = {{"race", r.group.race}, {"gender", r.group.gender}};
    j["n_probes"] = r.n_probes;
    j["n_singletons"] = r.n_singletons;
    j["n_degenerate"] = r.n_degenerate;
    if (r.d_prime_rank_one) j["d_prime_rank_one"] = *r.d_prime_rank_one;
    else j["d_prime_rank_one"] = nullptr;
    j["delta_tail"] = r.delta_tail_value;
    j["fpir_rank_one"] = r.fpir_rank_one;
    j["mated_stats"] = stats_json(r.mated_stats);
    j["nonmated_stats"] = stats_json(r.nonmated_stats);
    if (r.d_prime_one_to_one) j["d_prime_one_to_one"] = *r.d_prime_one_to_one;
    if (r.one_to_one_rates)
        j["one_to_one_rates"] = {{"fmr", r.one_to_one_rates->fmr},
                                 {"fnmr", r.one_to_one_rates->fnmr}};
    j["thresholds"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.thresholds) j["thresholds"][k] = v;
    j["diff_histogram"] = nlohmann::ordered_json::array();
    for (const auto& b : r.diff_histogram)
        j["diff_histogram"].push_back({b.low, b.high, b.count});
    j["notes"] = r.notes;
    return j.dump(2);
}

std::string report_csv_header() {
    return "race,gender,n_probes,n_singletons,n_degenerate,d_prime_rank_one,"
           "delta_tail,fpir_rank_one,mated_mean,mated_std,nonmated_mean,nonmated_std";
}

std::string report_to_csv_row(const MetricReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.group.race << ',' << r.group.gender << ',' << r.n_probes << ','
       << r.n_singletons << ',' << r.n_degenerate << ',';
    if (r.d_prime_rank_one) os << *r.d_prime_rank_one;
    os << ',' << r.delta_tail_value << ',' << r.fpir_rank_one << ','
       << r.mated_stats.mean << ',' << r.mated_stats.std_dev << ','
       << r.nonmated_stats.mean << ',' << r.nonmated_stats.std_dev;
    return os.str();
}

}  // namespace identik
