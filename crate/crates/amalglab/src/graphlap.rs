//! Graph Laplacians and the discrete signed projector (under construction).
