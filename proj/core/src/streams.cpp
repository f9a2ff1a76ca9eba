#include "sduo/streams.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sduo/rng.hpp"

namespace sduo {

namespace {

constexpr double kRange = 15.0;
constexpr std::uint64_t kStepTag = 0x57ea11ce;
constexpr std::uint64_t kSeedSetTag = 0x5eede117;
constexpr int kMaxRejects = 1000000;

double uniform_coord(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.0, kRange);
    return dist(rng);
}

} // namespace

SourceKind parse_source(const std::string& name) {
    if (name == "sea")
        return SourceKind::sea;
    if (name == "circles")
        return SourceKind::circles;
    if (name == "blobs")
        return SourceKind::blobs;
    if (name == "file")
        return SourceKind::file;
    throw std::invalid_argument("unknown dataset '" + name + "'");
}

std::string source_name(SourceKind kind) {
    switch (kind) {
    case SourceKind::sea:
        return "sea";
    case SourceKind::circles:
        return "circles";
    case SourceKind::blobs:
        return "blobs";
    case SourceKind::file:
        return "file";
    }
    return "?";
}

int source_classes(SourceKind kind) {
    switch (kind) {
    case SourceKind::sea:
    case SourceKind::circles:
        return 10;
    case SourceKind::blobs:
        return 12;
    case SourceKind::file:
        throw std::logic_error("file class count comes from the data");
    }
    return 0;
}

int source_dim(SourceKind kind) {
    switch (kind) {
    case SourceKind::sea:
    case SourceKind::circles:
        return 2;
    case SourceKind::blobs:
        return 3;
    case SourceKind::file:
        throw std::logic_error("file width comes from the data");
    }
    return 0;
}

StreamSpec make_variant_spec(SourceKind source, const std::string& variant) {
    if (source == SourceKind::file)
        throw std::invalid_argument("variants apply to synthetic sources only");
    StreamSpec spec;
    spec.source = source;
    spec.length = 18000;
    if (variant == "original") {
    } else if (variant == "abrupt") {
        spec.drift_times = {3000};
    } else if (variant == "imbalance") {
        spec.imbalance_ratio = 0.001;
    } else if (variant == "abrupt_imbalance") {
        spec.drift_times = {3000};
        spec.imbalance_ratio = 0.01;
    } else if (variant == "recurrent") {
        spec.drift_times = {3000, 6000, 9000, 12000};
    } else {
        throw std::invalid_argument("unknown variant '" + variant + "'");
    }
    return spec;
}

int sea_label(double x1, double x2) {
    // 10 equal-width bands of x1+x2 over [0, 30]
    const int band = static_cast<int>((x1 + x2) / 3.0);
    return 1 + std::clamp(band, 0, 9);
}

int circles_label(double x1, double x2) {
    // 10 equal-width annuli around the square's centre, the outermost
    // touching the corners
    const double width = kRange * std::sqrt(2.0) / 2.0 / 10.0;
    const double r = std::hypot(x1 - kRange / 2.0, x2 - kRange / 2.0);
    const int ring = static_cast<int>(r / width);
    return 1 + std::clamp(ring, 0, 9);
}

int drift_permutation(int label, int K) {
    return 1 + (label - 1 + K / 2) % K;
}

int concept_at(const StreamSpec& spec, int t) {
    int passed = 0;
    for (int d : spec.drift_times)
        if (d <= t)
            ++passed;
    return passed % 2;
}

int apply_imbalance(const StreamSpec& spec, int K, std::mt19937_64& rng) {
    if (!spec.imbalance_ratio.has_value()) {
        std::uniform_int_distribution<int> dist(1, K);
        return dist(rng);
    }
    const double ratio = *spec.imbalance_ratio;
    if (ratio <= 0.0 || (K - 1) * ratio >= 1.0)
        throw std::invalid_argument("imbalance ratio out of range");
    if (spec.majority_class < 1 || spec.majority_class > K)
        throw std::invalid_argument("majority class out of range");
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const double u = dist(rng);
    const double minority_mass = (K - 1) * ratio;
    if (u >= minority_mass)
        return spec.majority_class;
    int idx = static_cast<int>(u / ratio); // 0 .. K-2
    if (idx > K - 2)
        idx = K - 2;
    // skip the majority slot
    return idx + 1 < spec.majority_class ? idx + 1 : idx + 2;
}

std::vector<Eigen::Vector3d> blob_centers() {
    const double lo = 3.5, mid = 7.5, hi = 11.5;
    std::vector<Eigen::Vector3d> centers;
    for (double a : {lo, hi})
        for (double b : {lo, hi})
            for (double c : {lo, hi})
                centers.emplace_back(a, b, c);
    centers.emplace_back(mid, mid, lo);
    centers.emplace_back(mid, lo, mid);
    centers.emplace_back(lo, mid, mid);
    centers.emplace_back(hi, mid, mid);
    return centers;
}

LabelledExample gen_sea(int concept_id, std::mt19937_64& rng) {
    LabelledExample ex;
    ex.x = Eigen::Vector2d(uniform_coord(rng), uniform_coord(rng));
    ex.label = sea_label(ex.x(0), ex.x(1));
    if (concept_id == 1)
        ex.label = drift_permutation(ex.label, 10);
    return ex;
}

LabelledExample gen_circles(int concept_id, std::mt19937_64& rng) {
    LabelledExample ex;
    ex.x = Eigen::Vector2d(uniform_coord(rng), uniform_coord(rng));
    ex.label = circles_label(ex.x(0), ex.x(1));
    if (concept_id == 1)
        ex.label = drift_permutation(ex.label, 10);
    return ex;
}

LabelledExample gen_blobs(int concept_id, double sigma, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> cls_dist(1, 12);
    LabelledExample ex;
    ex.label = cls_dist(rng);
    ex.x = class_conditional_draw(SourceKind::blobs, concept_id, ex.label, sigma,
                                  rng);
    return ex;
}

Eigen::VectorXd class_conditional_draw(SourceKind source, int concept_id, int cls,
                                       double sigma, std::mt19937_64& rng) {
    if (source == SourceKind::blobs) {
        // class c sits at centre perm(c) under the drifted concept
        int centre_idx = cls;
        if (concept_id == 1)
            centre_idx = drift_permutation(cls, 12);
        const Eigen::Vector3d c = blob_centers()[static_cast<std::size_t>(centre_idx - 1)];
        std::normal_distribution<double> unit(0.0, 1.0);
        Eigen::Vector3d x;
        for (int e = 0; e < 3; ++e)
            x(e) = c(e) + sigma * unit(rng);
        return x;
    }
    // the undrifted label whose region we must hit
    int base = cls;
    if (concept_id == 1) {
        // invert the shift: label = perm(base)
        base = 1 + (cls - 1 + 10 - 10 / 2) % 10;
    }
    for (int tries = 0; tries < kMaxRejects; ++tries) {
        const double x1 = uniform_coord(rng), x2 = uniform_coord(rng);
        const int lab = source == SourceKind::sea ? sea_label(x1, x2)
                                                  : circles_label(x1, x2);
        if (lab == base)
            return Eigen::Vector2d(x1, x2);
    }
    throw std::runtime_error("class-conditional rejection did not terminate");
}

LoadedData load_delimited(const std::string& path, bool header_flag) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    LoadedData data;
    std::map<long long, int> remap;
    std::vector<long long> raw_labels;
    std::string line;
    int line_no = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (first_content) {
            bool numeric = true;
            try {
                std::size_t pos = 0;
                std::stod(cells.at(0), &pos);
                while (pos < cells[0].size() &&
                       std::isspace(static_cast<unsigned char>(cells[0][pos])))
                    ++pos;
                numeric = pos == cells[0].size();
            } catch (const std::exception&) {
                numeric = false;
            }
            first_content = false;
            if (header_flag || !numeric)
                continue; // header row
        }
        if (cells.size() < 2)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": need >= 1 feature and a label");
        if (data.dim == 0)
            data.dim = static_cast<int>(cells.size()) - 1;
        else if (static_cast<int>(cells.size()) - 1 != data.dim)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": ragged row (" +
                                     std::to_string(cells.size()) +
                                     " columns)");
        LabelledExample ex;
        ex.x.resize(data.dim);
        for (int e = 0; e < data.dim; ++e) {
            try {
                std::size_t pos = 0;
                ex.x(e) = std::stod(cells[static_cast<std::size_t>(e)], &pos);
                while (pos < cells[static_cast<std::size_t>(e)].size() &&
                       std::isspace(static_cast<unsigned char>(
                           cells[static_cast<std::size_t>(e)][pos])))
                    ++pos;
                if (pos != cells[static_cast<std::size_t>(e)].size())
                    throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": non-numeric feature '" +
                                         cells[static_cast<std::size_t>(e)] +
                                         "'");
            }
        }
        long long raw = 0;
        try {
            std::size_t pos = 0;
            raw = std::stoll(cells.back(), &pos);
            while (pos < cells.back().size() &&
                   std::isspace(static_cast<unsigned char>(cells.back()[pos])))
                ++pos;
            if (pos != cells.back().size())
                throw std::invalid_argument("trailing junk");
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": non-integer label '" + cells.back() +
                                     "'");
        }
        raw_labels.push_back(raw);
        data.examples.push_back(std::move(ex));
    }
    if (data.examples.empty())
        throw std::runtime_error("'" + path + "' holds no data rows");

    std::vector<long long> uniq = raw_labels;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (std::size_t i = 0; i < uniq.size(); ++i)
        remap[uniq[i]] = static_cast<int>(i) + 1;
    data.num_classes = static_cast<int>(uniq.size());
    for (std::size_t i = 0; i < data.examples.size(); ++i)
        data.examples[i].label = remap[raw_labels[i]];
    return data;
}

Stream::Stream(const StreamSpec& spec, int seed_per_class) : spec_(spec) {
    for (std::size_t i = 1; i < spec.drift_times.size(); ++i)
        if (spec.drift_times[i] <= spec.drift_times[i - 1])
            throw std::invalid_argument("drift times must strictly increase");
    if (!spec.drift_times.empty() &&
        spec.drift_times.back() >= spec.length && spec.source != SourceKind::file)
        throw std::invalid_argument("drift time beyond stream length");

    if (spec.source == SourceKind::file) {
        if (!spec.drift_times.empty() || spec.imbalance_ratio.has_value())
            throw std::invalid_argument(
                "drift/imbalance apply to synthetic sources only");
        LoadedData data = load_delimited(spec.path, spec.header);
        num_classes_ = data.num_classes;
        dim_ = data.dim;
        // earliest seed_per_class rows of each class become the warm-up set
        std::vector<int> taken(static_cast<std::size_t>(num_classes_ + 1), 0);
        for (auto& ex : data.examples) {
            if (taken[static_cast<std::size_t>(ex.label)] < seed_per_class) {
                ++taken[static_cast<std::size_t>(ex.label)];
                seed_.push_back(std::move(ex));
            } else {
                file_rows_.push_back(std::move(ex));
            }
        }
        length_ = static_cast<int>(file_rows_.size());
        return;
    }

    num_classes_ = source_classes(spec.source);
    dim_ = source_dim(spec.source);
    length_ = spec.length;
    if (spec.imbalance_ratio.has_value() &&
        ((num_classes_ - 1) * *spec.imbalance_ratio >= 1.0 ||
         *spec.imbalance_ratio <= 0.0))
        throw std::invalid_argument("imbalance ratio out of range");

    for (int c = 1; c <= num_classes_; ++c) {
        for (int i = 0; i < seed_per_class; ++i) {
            auto rng = make_rng(derive_seed(
                spec.seed, kSeedSetTag,
                static_cast<std::uint64_t>(c) * 1000 +
                    static_cast<std::uint64_t>(i)));
            LabelledExample ex;
            ex.label = c;
            ex.x = class_conditional_draw(spec.source, 0, c, spec.blob_sigma,
                                          rng);
            seed_.push_back(std::move(ex));
        }
    }
}

LabelledExample Stream::at(int t) const {
    if (t < 1 || t > length_)
        throw std::out_of_range("stream step out of range");
    if (spec_.source == SourceKind::file)
        return file_rows_[static_cast<std::size_t>(t - 1)];
    auto rng = make_rng(
        derive_seed(spec_.seed, kStepTag, static_cast<std::uint64_t>(t)));
    LabelledExample ex;
    ex.label = apply_imbalance(spec_, num_classes_, rng);
    ex.x = class_conditional_draw(spec_.source, concept_at(spec_, t), ex.label,
                                  spec_.blob_sigma, rng);
    return ex;
}

} // namespace sduo
