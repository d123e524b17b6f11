#pragma once

#include <cstdint>
#include <string>

#include "ssmrec/matrix.hpp"

namespace ssmrec {

// Layer-0 user and item latent vectors. Also used as the container for
// table-shaped gradients.
struct EmbeddingTable {
    Matrix user;  // M x d
    Matrix item;  // N x d

    int dim() const { return user.cols(); }

    friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) = default;
};

// Xavier-uniform init: entries in [-sqrt(6/(2d)), +sqrt(6/(2d))].
EmbeddingTable init_xavier(int num_users, int num_items, int dim, std::uint64_t seed);

// Binary checkpoint: 8-byte magic, u32 version, u64 M, u64 N, u32 d, then
// user rows followed by item rows as little-endian 64-bit floats.
void save_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace ssmrec
