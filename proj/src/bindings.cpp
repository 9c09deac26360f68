#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "identik/data_model.hpp"
#include "identik/degrade.hpp"
#include "identik/ingest.hpp"
#include "identik/matching.hpp"
#include "identik/metrics.hpp"
#include "identik/partition.hpp"
#include "identik/synth.hpp"

namespace py = pybind11;
using namespace identik;

namespace {

EmbeddingStore store_from_array(py::array_t<float, py::array::c_style | py::array::forcecast> arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("embeddings must be a 2-d array");
    std::vector<float> data(arr.data(), arr.data() + arr.size());
    return EmbeddingStore(static_cast<std::size_t>(arr.shape(1)), std::move(data));
}

std::vector<double> to_vec(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "identik core: rank-one identification accuracy and disparity metrics";

    py::class_<DemographicGroup>(m, "DemographicGroup")
        .def(py::init<std::string, std::string>(), py::arg("race"), py::arg("gender"))
        .def_readwrite("race", &DemographicGroup::race)
        .def_readwrite("gender", &DemographicGroup::gender)
        .def("key", &DemographicGroup::key);

    py::class_<Date>(m, "Date")
        .def(py::init([](const std::string& s) {
            Date d;
            if (!Date::parse(s, d)) throw std::invalid_argument("bad date: " + s);
            return d;
        }))
        .def("__str__", &Date::to_string);

    py::class_<ImageRecord>(m, "ImageRecord")
        .def(py::init([](std::string image_id, std::string subject_id, DemographicGroup g,
                         const std::string& date, std::size_t idx) {
                 ImageRecord r;
                 r.image_id = std::move(image_id);
                 r.subject_id = std::move(subject_id);
                 r.group = std::move(g);
                 if (!Date::parse(date, r.capture_date))
                     throw std::invalid_argument("bad date: " + date);
                 r.embedding_index = idx;
                 return r;
             }),
             py::arg("image_id"), py::arg("subject_id"), py::arg("group"),
             py::arg("capture_date"), py::arg("embedding_index"))
        .def_readonly("image_id", &ImageRecord::image_id)
        .def_readonly("subject_id", &ImageRecord::subject_id)
        .def_readonly("group", &ImageRecord::group)
        .def_readonly("embedding_index", &ImageRecord::embedding_index);

    py::class_<EmbeddingStore>(m, "EmbeddingStore")
        .def(py::init(&store_from_array), py::arg("array"))
        .def_property_readonly("dimension", &EmbeddingStore::dimension)
        .def_property_readonly("count", &EmbeddingStore::count);

    py::class_<DistributionStats>(m, "DistributionStats")
        .def(py::init([](std::size_t n, double mean, double std_dev, double mn, double mx) {
                 return DistributionStats{n, mean, std_dev, mn, mx};
             }),
             py::arg("n"), py::arg("mean"), py::arg("std_dev"), py::arg("min"),
             py::arg("max"))
        .def_readonly("n", &DistributionStats::n)
        .def_readonly("mean", &DistributionStats::mean)
        .def_readonly("std_dev", &DistributionStats::std_dev)
        .def_readonly("min", &DistributionStats::min)
        .def_readonly("max", &DistributionStats::max)
        .def_static("from_samples", [](py::array_t<double> a) {
            auto v = to_vec(a);
            return DistributionStats::from(v);
        });

    py::class_<ProbeGallerySplit>(m, "ProbeGallerySplit")
        .def_readonly("probes", &ProbeGallerySplit::probes)
        .def_readonly("gallery", &ProbeGallerySplit::gallery)
        .def_readonly("singleton_subjects", &ProbeGallerySplit::singleton_subjects)
        .def("to_json", &split_to_json);

    py::class_<RankOneResult>(m, "RankOneResult")
        .def_readonly("probe_image_id", &RankOneResult::probe_image_id)
        .def_readonly("subject_id", &RankOneResult::subject_id)
        .def_readonly("group", &RankOneResult::group)
        .def_readonly("mated_score", &RankOneResult::mated_score)
        .def_readonly("mated_argmax", &RankOneResult::mated_argmax)
        .def_readonly("nonmated_score", &RankOneResult::nonmated_score)
        .def_readonly("nonmated_argmax", &RankOneResult::nonmated_argmax);

    py::class_<RankOneOutput>(m, "RankOneOutput")
        .def_readonly("results", &RankOneOutput::results)
        .def_readonly("degenerate_probes", &RankOneOutput::degenerate_probes);

    m.def("validate_dataset", [](const std::vector<ImageRecord>& recs,
                                 const EmbeddingStore& store) {
        auto r = validate_dataset(recs, store);
        py::dict d;
        d["valid"] = r.valid();
        d["duplicates"] = r.duplicate_image_ids;
        d["inconsistent_group_subjects"] = r.inconsistent_group_subjects;
        d["out_of_range"] = r.out_of_range_image_ids;
        d["zero_norm"] = r.zero_norm_image_ids;
        d["bad_dates"] = r.bad_date_image_ids;
        return d;
    });

    m.def("read_manifest", &read_manifest);
    m.def("read_embeddings", &read_embeddings);
    m.def("write_manifest", &write_manifest);
    m.def("write_embeddings", &write_embeddings);

    m.def("build_split", &build_split);
    m.def("build_balanced_split",
          [](const std::vector<ImageRecord>& recs, std::size_t identities_per_group,
             std::size_t enrolled_per_identity, std::uint64_t seed) {
              return build_balanced_split(
                  recs, {identities_per_group, enrolled_per_identity, seed});
          },
          py::arg("records"), py::arg("identities_per_group"),
          py::arg("enrolled_per_identity") = 1, py::arg("seed") = 0);

    m.def("cosine", [](py::array_t<float, py::array::c_style | py::array::forcecast> u,
                       py::array_t<float, py::array::c_style | py::array::forcecast> v) {
        return cosine({u.data(), static_cast<std::size_t>(u.size())},
                      {v.data(), static_cast<std::size_t>(v.size())});
    });

    m.def("rank_one_scores", &rank_one_scores, py::arg("split"), py::arg("records"),
          py::arg("store"), py::arg("workers") = 1,
          py::call_guard<py::gil_scoped_release>());

    m.def("d_prime", &d_prime);
    m.def("empirical_quantile",
          [](py::array_t<double> scores, double q) {
              auto v = to_vec(scores);
              return empirical_quantile(v, q);
          });
    m.def("delta_tail",
          [](py::array_t<double> mated, py::array_t<double> nonmated, double tail_mass) {
              auto mv = to_vec(mated);
              auto nv = to_vec(nonmated);
              return delta_tail(mv, nv, tail_mass);
          },
          py::arg("mated"), py::arg("nonmated"), py::arg("tail_mass") = 0.001);
    m.def("fixed_threshold_rates",
          [](py::array_t<double> genuine, py::array_t<double> impostor, double t) {
              auto gv = to_vec(genuine);
              auto iv = to_vec(impostor);
              auto r = fixed_threshold_rates(gv, iv, t);
              return py::make_tuple(r.fmr, r.fnmr);
          });
    m.def("threshold_for_fmr", [](py::array_t<double> impostor, double target) {
        auto v = to_vec(impostor);
        return threshold_for_fmr(v, target);
    });
    m.def("open_set_fpir", [](py::array_t<double> nonmated, double t) {
        auto v = to_vec(nonmated);
        return open_set_fpir(v, t);
    });
    m.def("diff_fpir", [](const std::vector<RankOneResult>& results) {
        auto d = diff_distribution(results);
        return py::make_tuple(d.fpir, d.diffs);
    });
    m.def("shift_mated", &shift_mated);

    m.def("generate_synthetic",
          [](std::vector<std::tuple<std::string, std::string, std::size_t, std::size_t>> groups,
             std::size_t dimension, double within, double between, std::uint64_t seed) {
              SynthSpec spec;
              spec.dimension = dimension;
              spec.within_subject_concentration = within;
              spec.between_subject_concentration = between;
              spec.rng_seed = seed;
              for (auto& [race, gender, n, per] : groups)
                  spec.groups.push_back({{race, gender}, n, per});
              auto [records, store] = generate(spec);
              return py::make_tuple(records, store);
          },
          py::arg("groups"), py::arg("dimension") = 512, py::arg("within") = 10.0,
          py::arg("between") = 0.0, py::arg("seed") = 0);

    m.def("gaussian_blur_png",
          [](const std::filesystem::path& in, const std::filesystem::path& out,
             double sigma) {
              write_png(gaussian_blur(read_png(in), {sigma, 0}), out);
          });
    m.def("bicubic_resize_png",
          [](const std::filesystem::path& in, const std::filesystem::path& out, int w,
             int h) { write_png(bicubic_resize(read_png(in), w, h), out); });
}
