#pragma once

// Umbrella header for the critspectra toolkit: spectral signatures of
// criticality in empirical correlation matrices.

#include "critspectra/circulant.hpp"
#include "critspectra/config.hpp"
#include "critspectra/correlation.hpp"
#include "critspectra/errors.hpp"
#include "critspectra/fit.hpp"
#include "critspectra/io.hpp"
#include "critspectra/ising.hpp"
#include "critspectra/manifest.hpp"
#include "critspectra/mp.hpp"
#include "critspectra/numerics.hpp"
#include "critspectra/rmt.hpp"
#include "critspectra/rng.hpp"
#include "critspectra/spectra.hpp"
#include "critspectra/study.hpp"
#include "critspectra/version.hpp"
