#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ctmcred/model.hpp"

#ifndef CTMCRED_MODELS_DIR
#define CTMCRED_MODELS_DIR "models"
#endif

namespace fixtures {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string model_path(const std::string& name) {
  return std::string(CTMCRED_MODELS_DIR) + "/" + name + ".json";
}

inline ctmcred::ParamCtmc load(const std::string& name) {
  return ctmcred::load_model(read_file(model_path(name)));
}

inline ctmcred::ParamCtmc counterexample() { return load("counterexample"); }
inline ctmcred::ParamCtmc three_state() { return load("three_state"); }
inline ctmcred::ParamCtmc mwc() { return load("mwc"); }

}  // namespace fixtures
