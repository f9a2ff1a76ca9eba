#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sduo/memory.hpp"

namespace sduo {

enum class SourceKind { sea, circles, blobs, file };

SourceKind parse_source(const std::string& name);
std::string source_name(SourceKind kind);

// Full description of one stream. Synthetic sources draw each step's example
// from (seed, t) alone; file sources replay rows in file order.
struct StreamSpec {
    SourceKind source = SourceKind::sea;
    std::string path;                      // file sources only
    bool header = false;                   // skip first row of the file
    int length = 18000;
    std::vector<int> drift_times;          // strictly increasing, < length
    std::optional<double> imbalance_ratio; // per minority class
    int majority_class = 1;
    double blob_sigma = 1.0;
    std::uint64_t seed = 0;
};

// original | abrupt | imbalance | abrupt_imbalance | recurrent
StreamSpec make_variant_spec(SourceKind source, const std::string& variant);

int source_classes(SourceKind kind); // sea/circles 10, blobs 12
int source_dim(SourceKind kind);     // sea/circles 2, blobs 3

// Labelling functions of the undrifted concept.
int sea_label(double x1, double x2);
int circles_label(double x1, double x2);
// Label permutation applied by the drifted concept (cyclic shift by K/2).
int drift_permutation(int label, int K);

// Number of drift times passed at step t, mod 2.
int concept_at(const StreamSpec& spec, int t);

// Class draw honouring the imbalance ratio; uniform when no ratio is set.
int apply_imbalance(const StreamSpec& spec, int K, std::mt19937_64& rng);

// One example of the given concept with x drawn from the native input
// distribution (uniform square for sea/circles, uniform class then Gaussian
// for blobs). The streaming path is class-first via class_conditional_draw.
LabelledExample gen_sea(int concept_id, std::mt19937_64& rng);
LabelledExample gen_circles(int concept_id, std::mt19937_64& rng);
LabelledExample gen_blobs(int concept_id, double sigma, std::mt19937_64& rng);

// x | class under the given concept (rejection for sea/circles, direct
// Gaussian draw for blobs).
Eigen::VectorXd class_conditional_draw(SourceKind source, int concept_id, int cls,
                                       double sigma, std::mt19937_64& rng);

std::vector<Eigen::Vector3d> blob_centers();

// Whole-file ingestion: d feature columns then one integer label column,
// labels densely remapped to {1..K} by sorted original value. Errors carry
// the offending line number.
struct LoadedData {
    std::vector<LabelledExample> examples;
    int num_classes = 0;
    int dim = 0;
};
LoadedData load_delimited(const std::string& path, bool header_flag);

// Uniform step-indexed view over a synthetic generator or a loaded file.
// For files the warm-up labelled set is carved out of the rows (earliest
// seed_per_class occurrences of each class) and the remainder forms the
// stream; synthetic sources draw the warm-up set from the undrifted concept
// with a derived seed, leaving the stream untouched.
class Stream {
  public:
    Stream(const StreamSpec& spec, int seed_per_class);

    int num_classes() const { return num_classes_; }
    int dim() const { return dim_; }
    int length() const { return length_; }
    const std::vector<LabelledExample>& seed_data() const { return seed_; }

    // t ranges over [1, length]; synthetic draws depend only on (seed, t).
    LabelledExample at(int t) const;

  private:
    StreamSpec spec_;
    int num_classes_ = 0;
    int dim_ = 0;
    int length_ = 0;
    std::vector<LabelledExample> seed_;
    std::vector<LabelledExample> file_rows_;
};

} // namespace sduo
