#pragma once

// JSON persistence for fitted models. Doubles are written with shortest
// round-trip formatting, so save followed by load reproduces predictions
// bit for bit.

#include <string>

#include "vanish/oavi.hpp"
#include "vanish/pipeline.hpp"

namespace vanish {

std::string serialize(const GeneratorModel& model);
std::string serialize(const ClassifierModel& model);

GeneratorModel deserialize_generator_model(const std::string& text);
ClassifierModel deserialize_classifier_model(const std::string& text);

void save_model(const GeneratorModel& model, const std::string& path);
void save_model(const ClassifierModel& model, const std::string& path);

GeneratorModel load_generator_model(const std::string& path);
ClassifierModel load_classifier_model(const std::string& path);

}  // namespace vanish
