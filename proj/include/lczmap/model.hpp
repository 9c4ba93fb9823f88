#pragma once

#include <string>
#include <variant>

#include "lczmap/baselines.hpp"
#include "lczmap/nn.hpp"

namespace lcz {

enum class ModelKind : std::uint32_t { cnn = 0, ann = 1, rf = 2, svm = 3 };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(const std::string& name);

/// Any trained classifier, ready for serialization or map inference.
struct Model {
    std::variant<CnnModel, AnnModel, Forest, LinearSvmOvr> impl;

    ModelKind kind() const { return static_cast<ModelKind>(impl.index()); }
};

/// Versioned binary container: magic, version, kind tag, then raw
/// little-endian payload in layer order.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

} // namespace lcz
