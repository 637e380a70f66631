#pragma once

// File formats shared by the experiment runner.
//
//   dataset   header s0,s1,...; one frame per row
//   coder     header w0,w1,...; one weight-matrix row per CSV row
//   graph     nodes.csv (i,C_F) and edges.csv (i,j,L_H,R_ohm), ground is -1

#include <filesystem>

#include "physlearn/autoencoder.hpp"
#include "physlearn/resonet.hpp"

namespace physlearn::io {

void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

void write_coder(const std::filesystem::path& path, const LinearCoder& coder);
LinearCoder read_coder(const std::filesystem::path& path, CoderRole role);

void write_graph(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path,
                 const CircuitGraph& graph);
CircuitGraph read_graph(const std::filesystem::path& nodes_path, const std::filesystem::path& edges_path);

}  // namespace physlearn::io
