#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sera/graph.hpp"
#include "sera/matrix.hpp"

namespace sera {

// On-disk dataset: graph + features + labels + split masks. Directory layout:
//   meta.txt        n=<int> d=<int> classes=<int>, one key=value per line
//   edges.tsv       "u<TAB>v" per line, 0-based, u != v, unordered pair once
//   features.bin    row-major float32, little-endian, n*d values, no header
//   labels.tsv      one integer in [0, classes) per line, n lines
//   mask_train.tsv  sorted node ids, one per line
//   mask_test.tsv
//   mask_val.tsv    optional
struct DatasetBundle {
  Graph graph;
  DenseMatrix features;  // n x d
  std::vector<int32_t> labels;
  int32_t classes = 0;
  NodeSubset train_mask, test_mask, val_mask;  // val may be empty
  std::size_t duplicate_edges = 0;             // collapsed by the loader
};

DatasetBundle load_bundle(const std::filesystem::path& dir);
void save_bundle(const DatasetBundle& b, const std::filesystem::path& dir);

// Single-matrix file: "matrix <name> <rows> <cols>\n" then rows*cols float32
// little-endian values. Shared by representation dumps and checkpoints.
void save_matrix(const std::filesystem::path& file, const std::string& name,
                 const DenseMatrix& m);
DenseMatrix load_matrix(const std::filesystem::path& file, std::string* name = nullptr);

// Stream form of the same section layout, for files that hold several
// matrices back to back (model snapshots).
void write_matrix_section(std::ostream& os, const std::string& name, const DenseMatrix& m);
DenseMatrix read_matrix_section(std::istream& is, std::string* name = nullptr);

}  // namespace sera
