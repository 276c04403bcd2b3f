#pragma once

#include "monk/analysis.hpp"
#include "monk/datagen.hpp"
#include "monk/embedding.hpp"
#include "monk/error.hpp"
#include "monk/experiment.hpp"
#include "monk/kernels.hpp"
#include "monk/linalg.hpp"
#include "monk/mmd.hpp"
#include "monk/mon.hpp"
#include "monk/rng.hpp"
#include "monk/sample_io.hpp"
#include "monk/splice.hpp"
#include "monk/twosample.hpp"
#include "monk/types.hpp"
