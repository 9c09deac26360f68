#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "identik/data_model.hpp"
#include "identik/degrade.hpp"
#include "identik/ingest.hpp"
#include "identik/matching.hpp"
#include "identik/metrics.hpp"
#include "identik/partition.hpp"
#include "identik/synth.hpp"

namespace fs = std::filesystem;
using namespace identik;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitPipeline = 4;

struct Options {
    std::string manifest;
    std::string embeddings;
    std::string images;
    std::string out = "identik-out";
    std::string spec_path;
    std::string ladder = "blur";
    bool balanced = false;
    bool one_to_one = false;
    std::size_t identities_per_group = 0;
    std::size_t enrolled_per_identity = 1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    double tail_mass = 0.001;
    double hist_bin_width = 0.02;
    double impostor_subsample = 1.0;
    std::optional<double> target_fmr;
    std::optional<double> threshold;
};

void fail(const std::string& stage, const std::string& what) {
    // Single-line machine-parseable error.
    std::cerr << "error stage=" << stage << " message=\"" << what << "\"\n";
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ' ' || c == '/' || c == '\\') c = '_';
    return out;
}

int cmd_validate(const Options& opt) {
    auto records = read_manifest(opt.manifest);
    auto store = read_embeddings(opt.embeddings);
    auto rep = validate_dataset(records, store);

    nlohmann::ordered_json j;
    j["valid"] = rep.valid();
    j["duplicates"] = rep.duplicate_image_ids;
    j["inconsistent_group_subjects"] = rep.inconsistent_group_subjects;
    j["out_of_range"] = rep.out_of_range_image_ids;
    j["zero_norm"] = rep.zero_norm_image_ids;
    j["bad_dates"] = rep.bad_date_image_ids;
    std::cout << j.dump(2) << "\n";
    return rep.valid() ? kExitOk : kExitValidation;
}

int cmd_evaluate(const Options& opt) {
    auto records = read_manifest(opt.manifest);
    auto store = read_embeddings(opt.embeddings);

    auto vrep = validate_dataset(records, store);
    if (!vrep.valid()) {
        fail("validate", "dataset failed validation; run the validate subcommand");
        return kExitValidation;
    }

    ProbeGallerySplit split;
    if (opt.balanced) {
        if (opt.identities_per_group == 0) {
            fail("split", "--balanced requires --identities-per-group");
            return kExitUsage;
        }
        split = build_balanced_split(
            records, {opt.identities_per_group, opt.enrolled_per_identity, opt.seed});
    } else {
        split = build_split(records);
    }

    fs::create_directories(opt.out);
    {
        std::ofstream f(fs::path(opt.out) / "split.json", std::ios::binary);
        f << split_to_json(split) << "\n";
    }

    auto rank_one = rank_one_scores(split, records, store, opt.workers);
    write_rank_one_csv(rank_one, fs::path(opt.out) / "rank_one.csv");

    // Group rank-one results by demographic.
    std::map<std::string, std::vector<RankOneResult>> by_group;
    std::map<std::string, DemographicGroup> groups;
    for (const auto& r : rank_one.results) {
        by_group[r.group.key()].push_back(r);
        groups.emplace(r.group.key(), r.group);
    }

    ReportParams params;
    params.tail_mass = opt.tail_mass;
    params.hist_bin_width = opt.hist_bin_width;
    params.fixed_threshold = opt.threshold;
    params.target_fmr = opt.target_fmr;

    std::ofstream summary(fs::path(opt.out) / "summary.csv", std::ios::binary);
    summary << report_csv_header() << "\n";

    for (const auto& [key, results] : by_group) {
        std::optional<OneToOneScores> oto;
        if (opt.one_to_one) {
            OneToOneOptions o;
            o.group_filter = groups.at(key);
            o.impostor_subsample = opt.impostor_subsample;
            o.subsample_seed = opt.seed;
            oto = one_to_one_distributions(records, store, o);
        }
        auto report = build_report(results, oto ? &*oto : nullptr, groups.at(key), params);

        std::string tag = sanitize(key);
        {
            std::ofstream f(fs::path(opt.out) / ("report_" + tag + ".json"),
                            std::ios::binary);
            f << report_to_json(report) << "\n";
        }
        {
            std::ofstream f(fs::path(opt.out) / ("hist_" + tag + ".csv"),
                            std::ios::binary);
            f << "bin_low,bin_high,count\n";
            f.precision(17);
            for (const auto& b : report.diff_histogram)
                f << b.low << ',' << b.high << ',' << b.count << "\n";
        }
        summary << report_to_csv_row(report) << "\n";
    }

    auto gaps = time_between_mated(split, records);
    std::ofstream gapf(fs::path(opt.out) / "time_between_mated.csv", std::ios::binary);
    gapf << "race_gender,n,mean_days,std_days,min_days,max_days\n";
    gapf.precision(17);
    for (const auto& [key, s] : gaps)
        gapf << key << ',' << s.n << ',' << s.mean << ',' << s.std_dev << ',' << s.min
             << ',' << s.max << "\n";

    return kExitOk;
}

int cmd_degrade(const Options& opt) {
    // Image manifest: CSV "image_id,path".
    std::ifstream in(opt.images);
    if (!in) {
        fail("degrade", "cannot open image manifest: " + opt.images);
        return kExitValidation;
    }
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "image_id,path") {
        fail("degrade", "image manifest header must be image_id,path");
        return kExitValidation;
    }

    std::vector<std::pair<std::string, std::string>> entries;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) {
            fail("degrade", "malformed manifest row: " + line);
            return kExitValidation;
        }
        entries.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    if (entries.empty()) {
        std::cerr << "warning: empty image manifest, nothing to do\n";
        return kExitOk;
    }

    LadderKind kind = opt.ladder == "resolution" ? LadderKind::Resolution : LadderKind::Blur;
    fs::create_directories(opt.out);

    std::map<std::string, std::ofstream> level_manifests;
    std::vector<std::string> failures;
    for (const auto& [image_id, path] : entries) {
        try {
            RasterImage img = read_png(path);
            for (auto& [tag, degraded] : degradation_ladder(img, kind)) {
                fs::path dir = fs::path(opt.out) / tag;
                fs::create_directories(dir);
                fs::path out_path = dir / (image_id + ".png");
                write_png(degraded, out_path);
                auto it = level_manifests.find(tag);
                if (it == level_manifests.end()) {
                    it = level_manifests
                             .emplace(tag, std::ofstream(fs::path(opt.out) /
                                                             ("manifest_" + tag + ".csv"),
                                                         std::ios::binary))
                             .first;
                    it->second << "image_id,path\n";
                }
                it->second << image_id << ',' << out_path.string() << "\n";
            }
        } catch (const std::exception& e) {
            failures.push_back(image_id + ": " + e.what());
        }
    }
    for (const auto& f : failures) std::cerr << "failed " << f << "\n";
    return failures.empty() ? kExitOk : kExitPipeline;
}

int cmd_synth(const Options& opt) {
    std::ifstream in(opt.spec_path);
    if (!in) {
        fail("synth", "cannot open spec: " + opt.spec_path);
        return kExitValidation;
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("synth", std::string("spec parse error: ") + e.what());
        return kExitValidation;
    }

    SynthSpec spec;
    spec.dimension = j.value("dimension", 512);
    spec.within_subject_concentration = j.value("within_subject_concentration", 10.0);
    spec.between_subject_concentration = j.value("between_subject_concentration", 0.0);
    spec.rng_seed = j.value("rng_seed", opt.seed);
    for (const auto& g : j.at("groups")) {
        SynthGroupSpec gs;
        gs.group = {g.at("race").get<std::string>(), g.at("gender").get<std::string>()};
        gs.n_subjects = g.at("n_subjects").get<std::size_t>();
        gs.images_per_subject = g.value("images_per_subject", 2);
        spec.groups.push_back(std::move(gs));
    }

    auto [records, store] = generate(spec);
    fs::create_directories(opt.out);
    write_manifest(records, fs::path(opt.out) / "manifest.csv");
    write_embeddings(store, fs::path(opt.out) / "embeddings.emb");
    std::cout << "wrote " << records.size() << " records, dim " << store.dimension()
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"identik: 1-to-many face identification accuracy and disparity "
                 "evaluation over precomputed embeddings"};
    app.require_subcommand(1);
    app.set_config("--config");

    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "RNG seed");
    };

    auto* validate = app.add_subcommand("validate", "check a manifest + embedding pair");
    validate->add_option("--manifest", opt.manifest)->required();
    validate->add_option("--embeddings", opt.embeddings)->required();

    auto* evaluate = app.add_subcommand("evaluate", "full pipeline: split, match, metrics");
    evaluate->add_option("--manifest", opt.manifest)->required();
    evaluate->add_option("--embeddings", opt.embeddings)->required();
    evaluate->add_flag("--balanced", opt.balanced, "use the balanced sampling protocol");
    evaluate->add_option("--identities-per-group", opt.identities_per_group);
    evaluate->add_option("--enrolled-per-identity", opt.enrolled_per_identity);
    evaluate->add_option("--workers", opt.workers);
    evaluate->add_option("--tail-mass", opt.tail_mass, "tail mass for the delta metric");
    evaluate->add_option("--hist-bin-width", opt.hist_bin_width);
    evaluate->add_flag("--one-to-one", opt.one_to_one,
                       "also compute 1-to-1 genuine/impostor metrics per group");
    evaluate->add_option("--impostor-subsample", opt.impostor_subsample,
                         "keep probability for 1-to-1 impostor pairs");
    evaluate->add_option("--target-fmr", [&opt](const std::vector<std::string>& v) {
        opt.target_fmr = std::stod(v.at(0));
        return true;
    }, "derive a threshold hitting this FMR on 1-to-1 impostors");
    evaluate->add_option("--threshold", [&opt](const std::vector<std::string>& v) {
        opt.threshold = std::stod(v.at(0));
        return true;
    }, "fixed similarity threshold for FMR/FNMR and open-set FPIR");
    add_common(evaluate);

    auto* degrade = app.add_subcommand("degrade", "produce degraded probe-image ladders");
    degrade->add_option("--images", opt.images, "CSV manifest: image_id,path")->required();
    degrade->add_option("--ladder", opt.ladder, "blur | resolution")
        ->check(CLI::IsMember({"blur", "resolution"}));
    add_common(degrade);

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--spec", opt.spec_path, "JSON synthesis spec")->required();
    add_common(synth);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(opt);
        if (evaluate->parsed()) return cmd_evaluate(opt);
        if (degrade->parsed()) return cmd_degrade(opt);
        if (synth->parsed()) return cmd_synth(opt);
    } catch (const IngestError& e) {
        fail("ingest", e.what());
        return kExitValidation;
    } catch (const InsufficientIdentities& e) {
        fail("split", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        fail("pipeline", e.what());
        return kExitPipeline;
    }
    return kExitUsage;
}
