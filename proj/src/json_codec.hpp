#pragma once

#include <nlohmann/json.hpp>

#include "hotelwatt/ann.hpp"

namespace hotelwatt::detail {

nlohmann::ordered_json train_config_to_json(const ann::TrainConfig& config);
ann::TrainConfig train_config_from_json(const nlohmann::ordered_json& j);

}  // namespace hotelwatt::detail
