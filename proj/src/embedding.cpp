#include "ssmrec/embedding.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "ssmrec/rng.hpp"

namespace ssmrec {

namespace {
constexpr char kMagic[8] = {'S', 'S', 'M', 'R', 'E', 'C', 'E', 'B'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

EmbeddingTable init_xavier(int num_users, int num_items, int dim, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("embedding dim must be >= 1");
    double bound = std::sqrt(6.0 / (dim + dim));
    EmbeddingTable table{Matrix(num_users, dim), Matrix(num_items, dim)};
    Rng rng = Rng::stream(seed, 0x58415649);
    for (double& v : table.user.data()) v = rng.uniform(-bound, bound);
    for (double& v : table.item.data()) v = rng.uniform(-bound, bound);
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write embeddings: " + path);
    std::uint64_t m = static_cast<std::uint64_t>(table.user.rows());
    std::uint64_t n = static_cast<std::uint64_t>(table.item.rows());
    std::uint32_t d = static_cast<std::uint32_t>(table.user.cols());
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&kVersion), 4);
    out.write(reinterpret_cast<const char*>(&m), 8);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&d), 4);
    out.write(reinterpret_cast<const char*>(table.user.data().data()),
              static_cast<std::streamsize>(table.user.data().size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(table.item.data().data()),
              static_cast<std::streamsize>(table.item.data().size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write: " + path);
}

EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open embeddings: " + path);
    char magic[8];
    std::uint32_t version = 0, d = 0;
    std::uint64_t m = 0, n = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&m), 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&d), 4);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not an embedding checkpoint: " + path);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version in " + path);
    EmbeddingTable table{Matrix(static_cast<int>(m), static_cast<int>(d)),
                         Matrix(static_cast<int>(n), static_cast<int>(d))};
    in.read(reinterpret_cast<char*>(table.user.data().data()),
            static_cast<std::streamsize>(table.user.data().size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(table.item.data().data()),
            static_cast<std::streamsize>(table.item.data().size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return table;
}

}  // namespace ssmrec
