#pragma once

#include "entail/config.hpp"
#include "entail/error.hpp"
#include "entail/evec.hpp"
#include "entail/features.hpp"
#include "entail/labels.hpp"
#include "entail/manifest.hpp"
#include "entail/metrics.hpp"
#include "entail/nn/mlp.hpp"
#include "entail/nn/nnwt.hpp"
#include "entail/nn/train.hpp"
#include "entail/pipeline.hpp"
#include "entail/synthetic.hpp"
