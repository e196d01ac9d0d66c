"""UAV sensing-assisted inter-cell interference coordination simulator"""
