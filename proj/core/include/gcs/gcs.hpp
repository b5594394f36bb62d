#pragma once

#include "gcs/coherence.hpp"
#include "gcs/experiment.hpp"
#include "gcs/io.hpp"
#include "gcs/network.hpp"
#include "gcs/recovery.hpp"
#include "gcs/rng.hpp"
#include "gcs/sampling.hpp"
#include "gcs/svg.hpp"
#include "gcs/transform_spec.hpp"
#include "gcs/unitary.hpp"
#include "gcs/verification.hpp"
