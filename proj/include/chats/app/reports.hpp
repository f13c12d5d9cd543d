#pragma once

#include <json.hpp>

#include "chats/critic.hpp"
#include "chats/metaeval.hpp"
#include "chats/pipeline.hpp"

namespace chats {

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const ScoredSummary& s);
nlohmann::json to_json(const RepairedSummary& r);
nlohmann::json to_json(const RankedResult& r);
nlohmann::json to_json(const ClassifierReport& r);
nlohmann::json to_json(const CorrelationReport& r);
nlohmann::json to_json(const SweepResult& r);
nlohmann::json to_json(const KappaResult& r);

}  // namespace chats
