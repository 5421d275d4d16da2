// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/cli.hpp"

int main(int argc, char** argv) { return oce::cli::run(argc, argv); }
