#pragma once

#include "ned/adam.hpp"
#include "ned/checkpoint.hpp"
#include "ned/dataset.hpp"
#include "ned/embedding.hpp"
#include "ned/errors.hpp"
#include "ned/features.hpp"
#include "ned/gradcheck.hpp"
#include "ned/graph.hpp"
#include "ned/layers.hpp"
#include "ned/metrics.hpp"
#include "ned/model_check.hpp"
#include "ned/models.hpp"
#include "ned/random.hpp"
#include "ned/synthetic.hpp"
#include "ned/tensor.hpp"
#include "ned/text_encoder.hpp"
#include "ned/threshold.hpp"
#include "ned/training.hpp"
