#pragma once

#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace identik {

// Demographic cohort tag. Labels are opaque; the rendered key is
// "<race> <gender>".
struct DemographicGroup {
    std::string race;
    std::string gender;

    std::string key() const { return race + " " + gender; }

    auto operator<=>(const DemographicGroup&) const = default;
};

// Calendar date, day granularity. Stored as a validated Y/M/D triple.
struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    bool ok() const {
        using namespace std::chrono;
        return year_month_day{std::chrono::year{year}, std::chrono::month{month},
                              std::chrono::day{day}}
            .ok();
    }

    // Days since 1970-01-01 (negative before).
    long to_days() const {
        using namespace std::chrono;
        sys_days d = year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
        return d.time_since_epoch().count();
    }

    std::string to_string() const;

    static Date from_days(long days_since_epoch) {
        using namespace std::chrono;
        year_month_day ymd{sys_days{days{days_since_epoch}}};
        return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day())};
    }

    // Parses "YYYY-MM-DD". Returns false on any malformed or invalid date.
    static bool parse(const std::string& s, Date& out);

    auto operator<=>(const Date&) const = default;
};

struct ImageRecord {
    std::string image_id;
    std::string subject_id;
    DemographicGroup group;
    Date capture_date;
    std::size_t embedding_index = 0;
};

class EmbeddingStore {
public:
    EmbeddingStore() = default;
    EmbeddingStore(std::size_t dimension, std::vector<float> data)
        : dim_(dimension), data_(std::move(data)) {
        if (dim_ == 0) throw std::invalid_argument("embedding dimension must be positive");
        if (data_.size() % dim_ != 0)
            throw std::invalid_argument("embedding payload not a multiple of dimension");
    }

    std::size_t dimension() const { return dim_; }
    std::size_t count() const { return dim_ == 0 ? 0 : data_.size() / dim_; }

    std::span<const float> vec(std::size_t i) const {
        return {data_.data() + i * dim_, dim_};
    }

    const std::vector<float>& raw() const { return data_; }

private:
    std::size_t dim_ = 0;
    std::vector<float> data_;
};

struct ScoreSample {
    std::string probe_image_id;
    std::string other_image_id;
    double score = 0.0;  // cosine, clamped to [-1, 1]
};

// Summary statistics of one score population. std_dev is the population
// formula (divide by n).
struct DistributionStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double min = 0.0;
    double max = 0.0;

    static DistributionStats from(std::span<const double> samples);
};

struct ValidationReport {
    std::vector<std::string> duplicate_image_ids;
    std::vector<std::string> inconsistent_group_subjects;
    std::vector<std::string> out_of_range_image_ids;
    std::vector<std::string> zero_norm_image_ids;
    std::vector<std::string> bad_date_image_ids;

    bool valid() const {
        return duplicate_image_ids.empty() && inconsistent_group_subjects.empty() &&
               out_of_range_image_ids.empty() && zero_norm_image_ids.empty() &&
               bad_date_image_ids.empty();
    }
};

ValidationReport validate_dataset(const std::vector<ImageRecord>& records,
                                  const EmbeddingStore& store);

}  // namespace identik
