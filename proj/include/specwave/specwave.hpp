#pragma once

#include "specwave/analysis.hpp"
#include "specwave/cli.hpp"
#include "specwave/config.hpp"
#include "specwave/errors.hpp"
#include "specwave/fft.hpp"
#include "specwave/grid.hpp"
#include "specwave/integrator.hpp"
#include "specwave/io.hpp"
#include "specwave/model.hpp"
#include "specwave/plot.hpp"
#include "specwave/studies.hpp"
#include "specwave/version.hpp"
