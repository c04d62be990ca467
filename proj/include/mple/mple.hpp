#pragma once

#include "mple/artifact_graph.hpp"
#include "mple/canonical_hash.hpp"
#include "mple/clone_detection.hpp"
#include "mple/clone_generator.hpp"
#include "mple/component.hpp"
#include "mple/digest.hpp"
#include "mple/error.hpp"
#include "mple/evaluation.hpp"
#include "mple/feature_model.hpp"
#include "mple/interchange.hpp"
#include "mple/java_subset.hpp"
#include "mple/platform.hpp"
#include "mple/presence_condition.hpp"
#include "mple/similarity.hpp"
#include "mple/tokenizer.hpp"
#include "mple/variability_mining.hpp"
