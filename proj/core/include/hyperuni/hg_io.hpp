#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hyperuni/hypergraph.hpp"

namespace hyperuni {

// Text hypergraph format (.hg):
//
//   # optional comments, anywhere
//   r n m
//   v_1 ... v_r        (m lines, 0-based ids)
//
// Blank lines are skipped. Errors carry the 1-based line number.

struct CommentLine {
    std::size_t line = 0;
    std::string text;  // without the leading '#'
};

/// Parses a .hg stream. Comment lines are appended to `comments` when given.
Hypergraph read_hg(std::istream& in, std::vector<CommentLine>* comments = nullptr);
Hypergraph read_hg_file(const std::filesystem::path& path, std::vector<CommentLine>* comments = nullptr);

/// Writes the canonical form: header line then one ascending edge per line in
/// lexicographic order.
void write_hg(std::ostream& out, const Hypergraph& h);
void write_hg_file(const std::filesystem::path& path, const Hypergraph& h);

std::string to_hg_string(const Hypergraph& h);

}  // namespace hyperuni
