#include "ilnet/mlp.hpp"

namespace ilnet {

std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }

std::string to_string(OutputActivation a) {
  return a == OutputActivation::identity ? "identity" : "softplus";
}

Activation parse_activation(const std::string& tag) {
  if (tag == "tanh") return Activation::tanh;
  if (tag == "relu") return Activation::relu;
  throw DataError("unknown activation '" + tag + "'");
}

OutputActivation parse_output_activation(const std::string& tag) {
  if (tag == "identity") return OutputActivation::identity;
  if (tag == "softplus") return OutputActivation::softplus;
  throw DataError("unknown output activation '" + tag + "'");
}

}  // namespace ilnet
