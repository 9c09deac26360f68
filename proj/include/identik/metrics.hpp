#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "identik/data_model.hpp"
#include "identik/matching.hpp"

namespace identik {

inline constexpr const char* kReportSchema = "identik-report/1";

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateDistributions : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoMatedProbes : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ErrorUnachievable : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// |mean_a - mean_b| / sqrt((var_a + var_b) / 2)
double d_prime(const DistributionStats& a, const DistributionStats& b);

// Nearest-rank quantile: sorted ascending, element at index ceil(q*n)-1
// (clamped). No interpolation.
double empirical_quantile(std::span<const double> scores, double q);

// Low tail of mated minus high tail of non-mated; positive means separation.
// tail_mass defaults to the 1-in-1000 convention.
double delta_tail(std::span<const double> mated, std::span<const double> nonmated,
                  double tail_mass = 0.001);

struct DiffDistribution {
    std::vector<double> diffs;        // mated - nonmated, one per eligible probe
    double fpir = 0.0;                // fraction with diff <= 0 (ties count as FPI)
    std::size_t n_singletons = 0;     // probes excluded for missing mated score
    std::size_t n_degenerate = 0;     // probes excluded for missing non-mated score
};

DiffDistribution diff_distribution(const std::vector<RankOneResult>& results);

struct ThresholdRates {
    double fmr = 0.0;   // fraction of impostor scores >= threshold
    double fnmr = 0.0;  // fraction of genuine scores < threshold
};

ThresholdRates fixed_threshold_rates(std::span<const double> genuine,
                                     std::span<const double> impostor, double threshold);

// Smallest observed score t with fraction(impostor >= t) <= target_fmr.
// Throws ErrorUnachievable when even the maximum score exceeds the target.
double threshold_for_fmr(std::span<const double> impostor, double target_fmr);

// Fraction of non-mated rank-one scores >= threshold: the rate at which
// open-set (unenrolled-probe) searches would alarm.
double open_set_fpir(std::span<const double> nonmated, double threshold);

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::size_t count = 0;
};

struct ReportParams {
    double tail_mass = 0.001;
    double hist_bin_width = 0.02;            // over [-1, 1] -> 100 bins by default
    std::optional<double> fixed_threshold;   // for 1-to-1 FMR/FNMR
    std::optional<double> target_fmr;        // for threshold_for_fmr on 1-to-1 impostors
};

struct MetricReport {
    DemographicGroup group;
    std::size_t n_probes = 0;
    std::size_t n_singletons = 0;
    std::size_t n_degenerate = 0;
    std::optional<double> d_prime_rank_one;
    double delta_tail_value = 0.0;
    double fpir_rank_one = 0.0;
    DistributionStats mated_stats;
    DistributionStats nonmated_stats;
    std::vector<HistogramBin> diff_histogram;  // of (mated - nonmated)
    std::map<std::string, double> thresholds;
    std::optional<double> d_prime_one_to_one;
    std::optional<ThresholdRates> one_to_one_rates;
    std::vector<std::string> notes;
};

// Assembles the per-group report from rank-one results (all of one group) and
// optional 1-to-1 score populations.
MetricReport build_report(const std::vector<RankOneResult>& results,
                          const OneToOneScores* one_to_one, const DemographicGroup& group,
                          const ReportParams& params = {});

std::string report_to_json(const MetricReport& report);
std::string report_csv_header();
std::string report_to_csv_row(const MetricReport& report);

}  // namespace identik
