#include "wavelab/transform_io.hpp"

#include <cstring>
#include <fstream>

namespace wavelab {

namespace {

constexpr char kMagic[8] = {'W', 'L', 'N', 'O', 'F', 'S', 'P', '1'};

template <typename T>
void write_pod(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw ConfigError("truncated transform file");
    return v;
}

void write_transform(std::ostream& os, const LinearTransform& t) {
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.rows()));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.cols()));
    write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(t.activation()));
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) write_pod<double>(os, t.weights()(i, j));
    for (Eigen::Index i = 0; i < t.rows(); ++i) write_pod<double>(os, t.bias()(i));
    for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j) write_pod<std::uint8_t>(os, t.mask()(i, j));
}

LinearTransform read_transform(std::istream& is) {
    const auto rows = static_cast<Eigen::Index>(read_pod<std::uint32_t>(is));
    const auto cols = static_cast<Eigen::Index>(read_pod<std::uint32_t>(is));
    const auto act = static_cast<Activation>(read_pod<std::uint8_t>(is));
    if (act != Activation::linear) throw ConfigError("unknown activation tag in transform file");
    RealMatrix w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = read_pod<double>(is);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) b(i) = read_pod<double>(is);
    MaskMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = read_pod<std::uint8_t>(is);
    return {std::move(w), std::move(b), std::move(m), act};
}

}  // namespace

void save_pair(const std::string& path, const TransformPair& pair) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open transform file for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(os, pair.meta.data_symbols);
    write_pod<std::uint32_t>(os, pair.meta.compressed_symbols);
    write_pod<std::uint32_t>(os, pair.meta.fft_size);
    write_pod<std::uint64_t>(os, pair.meta.seed);
    write_pod<std::uint64_t>(os, pair.meta.config_digest);
    write_transform(os, pair.forward);
    write_transform(os, pair.inverse);
    if (!os) throw ConfigError("failed while writing transform file: " + path);
}

TransformPair load_pair(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open transform file: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ConfigError("not a transform-pair file (bad magic): " + path);
    PairMeta meta;
    meta.data_symbols = read_pod<std::uint32_t>(is);
    meta.compressed_symbols = read_pod<std::uint32_t>(is);
    meta.fft_size = read_pod<std::uint32_t>(is);
    meta.seed = read_pod<std::uint64_t>(is);
    meta.config_digest = read_pod<std::uint64_t>(is);
    LinearTransform fw = read_transform(is);
    LinearTransform rv = read_transform(is);
    TransformPair pair{std::move(fw), std::move(rv), static_cast<int>(meta.data_symbols),
                       static_cast<int>(meta.compressed_symbols), meta};
    pair.validate();
    return pair;
}

}  // namespace wavelab
