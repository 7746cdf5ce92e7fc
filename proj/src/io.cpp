namespace mpuphase {}
