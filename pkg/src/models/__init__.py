"""Record models shared by services, persistence and the command line."""
