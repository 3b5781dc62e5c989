#pragma once

// Umbrella include for the whole library.

#include "coggen/ablation.hpp"
#include "coggen/complex_grid.hpp"
#include "coggen/config.hpp"
#include "coggen/errors.hpp"
#include "coggen/fft.hpp"
#include "coggen/forward_model.hpp"
#include "coggen/inr.hpp"
#include "coggen/io.hpp"
#include "coggen/metrics.hpp"
#include "coggen/optimizer.hpp"
#include "coggen/phantom.hpp"
#include "coggen/rng.hpp"
#include "coggen/sampling_mask.hpp"
#include "coggen/small_matrix.hpp"
#include "coggen/spcl.hpp"
#include "coggen/svd.hpp"
#include "coggen/theory.hpp"
#include "coggen/verify.hpp"
