# DeepAgents Test Suite
