#pragma once

// Umbrella header for the conditional WGAN library.

#include "cwgan/commands.hpp"
#include "cwgan/config.hpp"
#include "cwgan/data.hpp"
#include "cwgan/error.hpp"
#include "cwgan/eval.hpp"
#include "cwgan/matrix.hpp"
#include "cwgan/model_io.hpp"
#include "cwgan/networks.hpp"
#include "cwgan/nn.hpp"
#include "cwgan/rng.hpp"
#include "cwgan/svg.hpp"
#include "cwgan/train.hpp"
