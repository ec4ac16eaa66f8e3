"""AI Chatbot Service - Main package."""

