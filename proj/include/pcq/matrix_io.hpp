#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pcq/pcm.hpp"

namespace pcq {

/// Reciprocity tolerance applied to matrices read from text. Files usually
/// carry reciprocals rounded to a handful of digits.
inline constexpr double kFileReciprocityTolerance = 1e-9;

/// Reads one matrix: a line holding n, then n rows of n comma-separated
/// cells. Missing cells are empty or `*`. `source` names the input in errors.
/// Returns false at end of input before any matrix starts.
bool read_matrix_csv(std::istream& in, const std::string& source, IncompleteMatrix& out);

/// Reads every matrix in the stream (one or more blocks, blank lines allowed
/// between blocks).
std::vector<IncompleteMatrix> read_matrices_csv(std::istream& in, const std::string& source);

IncompleteMatrix read_matrix_file(const std::string& path);

/// Writes the block format read by read_matrix_csv, with round-trip precision.
void write_matrix_csv(std::ostream& out, const IncompleteMatrix& m);
void write_matrix_csv(std::ostream& out, const PairwiseComparisonMatrix& m);

/// Verbal judgments with header `i,j,category,direction`.
std::vector<VerbalJudgment> read_verbal_csv(std::istream& in, const std::string& source);
std::vector<VerbalJudgment> read_verbal_file(const std::string& path);
void write_verbal_csv(std::ostream& out, const std::vector<VerbalJudgment>& judgments);

/// Splits a CSV line on commas; no quoting.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace pcq
