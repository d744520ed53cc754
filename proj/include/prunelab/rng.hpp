#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace prunelab {

// What a random stream is used for. Each (seed, index, purpose) triple maps to
// an independent stream, so results do not depend on scheduling order.
enum class StreamPurpose : std::uint64_t {
    Directions = 1,
    Design = 2,
    Selection = 3,
    TestPoints = 4,
    Validation = 5,
    InitialPool = 6,
    Augmentation = 7,
    CellSeed = 8,
    PairedSeed = 9,
    MeanVector = 10,
};

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose);

/// mt19937_64 engine plus a standard normal generator. Normals come from
/// libstdc++'s std::normal_distribution (Marsaglia polar method); bit-exact
/// reproducibility holds for a fixed toolchain.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    RandomStream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose)
        : engine_(derive_seed(seed, index, purpose)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    Eigen::VectorXd normal_vector(Eigen::Index d);
    /// Rows are i.i.d. N(0, I_d); filled row by row.
    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace prunelab
