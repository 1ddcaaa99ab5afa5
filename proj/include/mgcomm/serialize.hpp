#pragma once

#include <string>
#include <vector>

#include "mgcomm/grid_model.hpp"
#include "mgcomm/synthesis.hpp"
#include "mgcomm/topology.hpp"

namespace mgcomm {

GridParams grid_params_from_json(const std::string& text);
std::string grid_params_to_json(const GridParams& p);

std::string model_to_json(const StateSpaceModel& model);
StateSpaceModel model_from_json(const std::string& text);

LayeredNetwork network_from_json(const std::string& text);
ConstraintSet constraints_from_json(const std::string& text);
std::string constraints_to_json(const ConstraintSet& cs);

std::string paths_to_json(const std::vector<Path>& paths);
std::string sets_to_json(const std::vector<ConnectionSet>& sets);

std::string synthesis_to_json(const SynthesisResult& r);

Matrix matrix_from_json(const std::string& text);
std::string matrix_to_json(const Matrix& m);
Matrix matrix_from_csv(const std::string& text);

}  // namespace mgcomm
