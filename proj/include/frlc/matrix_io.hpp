#pragma once

// CSV and binary ("FRLCMAT1" header, u32 rows, u32 cols, f64 little-endian,
// row-major) matrix files. The binary format is selected by the ".mat" suffix.

#include "frlc/datasets.hpp"
#include "frlc/types.hpp"

#include <string>

namespace frlc::io {

Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& M);

// A single row or a single column.
Vector read_vector(const std::string& path);
void write_vector(const std::string& path, const Vector& v);

Matrix parse_csv(const std::string& text);
std::string format_csv(const Matrix& M);

Matrix read_binary(const std::string& path);
void write_binary(const std::string& path, const Matrix& M);

// Points with an optional header line; a trailing "label" column is split off.
PointCloud read_points(const std::string& path);
void write_points(const std::string& path, const PointCloud& pc);

std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

}  // namespace frlc::io
